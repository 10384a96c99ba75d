#pragma once

// Finite groups as dense Cayley tables, plus the subgroup machinery every
// relation computation needs: enumeration of the subgroup lattice,
// normalizers, coset transversals, abelian invariants and the non-cyclic
// order-pq subgroup test.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "normrel/common.hpp"
#include "normrel/numbertheory.hpp"

namespace normrel {

struct FiniteGroup {
    long order = 1;
    std::vector<int32_t> table;       // row-major, order x order
    std::vector<int32_t> inverses;    // inverses[i] * i = identity
    std::vector<long> element_orders; // multiplicative orders
    std::string label;

    static constexpr int32_t identity = 0;

    int32_t mul(int32_t a, int32_t b) const { return table[static_cast<std::size_t>(a) * order + b]; }
    int32_t inv(int32_t a) const { return inverses[a]; }

    int32_t power(int32_t a, long k) const {
        long n = element_orders[a];
        k %= n;
        if (k < 0) k += n;
        int32_t r = identity;
        int32_t base = a;
        while (k > 0) {
            if (k & 1) r = mul(r, base);
            base = mul(base, base);
            k >>= 1;
        }
        return r;
    }

    bool is_abelian() const {
        for (int32_t a = 0; a < order; ++a)
            for (int32_t b = a + 1; b < order; ++b)
                if (mul(a, b) != mul(b, a)) return false;
        return true;
    }
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

// Element subsets as bitmasks.
class ElementMask {
public:
    ElementMask() = default;
    explicit ElementMask(long n) : n_(n), words_((n + 63) / 64, 0) {}

    void set(int32_t i) { words_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    bool test(int32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    long count() const {
        long c = 0;
        for (uint64_t w : words_) c += __builtin_popcountll(w);
        return c;
    }
    bool operator==(const ElementMask& o) const { return words_ == o.words_; }
    bool operator<(const ElementMask& o) const { return words_ < o.words_; }
    bool contains(const ElementMask& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (o.words_[i] & ~words_[i]) return false;
        return true;
    }
    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (uint64_t w : words_) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return h;
    }
    std::vector<int32_t> elements() const {
        std::vector<int32_t> out;
        for (int32_t i = 0; i < n_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

private:
    long n_ = 0;
    std::vector<uint64_t> words_;
};

struct ElementMaskHash {
    std::size_t operator()(const ElementMask& m) const { return m.hash(); }
};

struct Subgroup {
    GroupPtr parent;
    std::vector<int32_t> elements;  // sorted ascending, always contains 0

    long order() const { return static_cast<long>(elements.size()); }
    long index() const { return parent->order / order(); }
    bool contains(int32_t x) const { return std::binary_search(elements.begin(), elements.end(), x); }
    ElementMask mask() const {
        ElementMask m(parent->order);
        for (int32_t e : elements) m.set(e);
        return m;
    }
    bool is_cyclic() const {
        for (int32_t e : elements)
            if (parent->element_orders[e] == order()) return true;
        return false;
    }
    bool is_trivial() const { return elements.size() == 1; }
    bool operator==(const Subgroup& o) const { return elements == o.elements; }
};

namespace detail {

inline void finish_group(FiniteGroup& g) {
    long n = g.order;
    g.inverses.assign(n, 0);
    for (int32_t a = 0; a < n; ++a)
        for (int32_t b = 0; b < n; ++b)
            if (g.mul(a, b) == FiniteGroup::identity) {
                g.inverses[a] = b;
                break;
            }
    g.element_orders.assign(n, 1);
    for (int32_t a = 0; a < n; ++a) {
        long k = 1;
        int32_t x = a;
        while (x != FiniteGroup::identity) {
            x = g.mul(x, a);
            ++k;
        }
        g.element_orders[a] = k;
    }
}

}  // namespace detail

// Breadth-first closure of a permutation generating set; element 0 is the
// identity and enumeration order is deterministic (generators applied on the
// right, in input order).
inline GroupPtr group_from_permutations(const std::vector<std::vector<int32_t>>& generators,
                                        long cap = default_order_cap(), std::string label = "") {
    std::size_t m = generators.empty() ? 1 : generators[0].size();
    for (const auto& p : generators) {
        if (p.size() != m) throw std::invalid_argument("permutations act on different point counts");
        std::vector<bool> seen(m, false);
        for (int32_t v : p) {
            if (v < 0 || static_cast<std::size_t>(v) >= m || seen[v])
                throw std::invalid_argument("invalid permutation");
            seen[v] = true;
        }
    }
    std::vector<int32_t> id(m);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int32_t>> elems{id};
    std::map<std::vector<int32_t>, int32_t> index{{id, 0}};
    for (std::size_t head = 0; head < elems.size(); ++head) {
        for (const auto& gen : generators) {
            std::vector<int32_t> prod(m);
            for (std::size_t i = 0; i < m; ++i) prod[i] = elems[head][gen[i]];
            if (index.emplace(prod, static_cast<int32_t>(elems.size())).second) {
                elems.push_back(prod);
                if (static_cast<long>(elems.size()) > cap)
                    throw cap_exceeded("permutation closure exceeds order cap");
            }
        }
    }
    auto g = std::make_shared<FiniteGroup>();
    long n = static_cast<long>(elems.size());
    g->order = n;
    g->label = label.empty() ? "perm" + std::to_string(n) : std::move(label);
    g->table.assign(static_cast<std::size_t>(n) * n, 0);
    std::vector<int32_t> prod(m);
    for (long a = 0; a < n; ++a)
        for (long b = 0; b < n; ++b) {
            for (std::size_t i = 0; i < m; ++i) prod[i] = elems[a][elems[b][i]];
            g->table[a * n + b] = index.at(prod);
        }
    detail::finish_group(*g);
    return g;
}

// Direct product of cyclic groups; the element index encodes the mixed-radix
// exponent tuple (first invariant = least significant digit).
inline GroupPtr group_from_abelian_invariants(const std::vector<long>& invariants,
                                              long cap = default_order_cap()) {
    long n = 1;
    for (long d : invariants) {
        if (d < 1) throw std::invalid_argument("abelian invariant must be >= 1");
        if (d > cap || n > cap / d) throw cap_exceeded("abelian group exceeds order cap");
        n *= d;
    }
    auto g = std::make_shared<FiniteGroup>();
    g->order = n;
    std::string label;
    for (long d : invariants) label += (label.empty() ? "C" : "xC") + std::to_string(d);
    g->label = label.empty() ? "C1" : label;
    g->table.assign(static_cast<std::size_t>(n) * n, 0);
    std::size_t k = invariants.size();
    std::vector<long> ta(k), tb(k);
    for (long a = 0; a < n; ++a) {
        long r = a;
        for (std::size_t i = 0; i < k; ++i) {
            ta[i] = r % invariants[i];
            r /= invariants[i];
        }
        for (long b = 0; b < n; ++b) {
            long s = b, idx = 0, stride = 1;
            for (std::size_t i = 0; i < k; ++i) {
                tb[i] = s % invariants[i];
                s /= invariants[i];
                idx += ((ta[i] + tb[i]) % invariants[i]) * stride;
                stride *= invariants[i];
            }
            g->table[a * n + b] = static_cast<int32_t>(idx);
        }
    }
    detail::finish_group(*g);
    return g;
}

inline GroupPtr direct_product(const GroupPtr& g1, const GroupPtr& g2, long cap = default_order_cap()) {
    long n1 = g1->order, n2 = g2->order;
    if (n1 > cap / n2) throw cap_exceeded("direct product exceeds order cap");
    long n = n1 * n2;
    auto g = std::make_shared<FiniteGroup>();
    g->order = n;
    g->label = g1->label + "x" + g2->label;
    g->table.assign(static_cast<std::size_t>(n) * n, 0);
    for (long a = 0; a < n; ++a) {
        int32_t a1 = static_cast<int32_t>(a % n1), a2 = static_cast<int32_t>(a / n1);
        for (long b = 0; b < n; ++b) {
            int32_t b1 = static_cast<int32_t>(b % n1), b2 = static_cast<int32_t>(b / n1);
            g->table[a * n + b] = g1->mul(a1, b1) + n1 * g2->mul(a2, b2);
        }
    }
    detail::finish_group(*g);
    return g;
}

// Named constructors: C<n>, S<n>, A<n>, D<n>, Q8, SL2_<p>. The SL2 family is
// provided for completeness; already SL2_17 has order 4896, so it stays out
// of routine test corpora.
inline GroupPtr named_group(const std::string& name, long cap = default_order_cap()) {
    auto num = [&](std::size_t off) -> long {
        if (off >= name.size()) throw std::invalid_argument("bad group name: " + name);
        return std::stol(name.substr(off));
    };
    auto relabel = [&](GroupPtr g) {
        auto h = std::make_shared<FiniteGroup>(*g);
        h->label = name;
        return GroupPtr(h);
    };
    if (name == "Q8") {
        return relabel(group_from_permutations({{2, 3, 1, 0, 6, 7, 5, 4}, {4, 5, 7, 6, 1, 0, 2, 3}}, cap));
    }
    if (name.rfind("SL2_", 0) == 0) {
        long p = num(4);
        if (!is_prime(p)) throw std::invalid_argument("SL2_<p> needs p prime");
        long pts = p * p - 1;  // nonzero vectors of F_p^2, index = x + p*y - 1
        if (p * pts > cap) throw cap_exceeded("SL2 group exceeds order cap");
        auto act = [&](long a, long b, long c, long d) {
            std::vector<int32_t> perm(pts);
            for (long x = 0; x < p; ++x)
                for (long y = 0; y < p; ++y) {
                    if (x == 0 && y == 0) continue;
                    long u = (a * x + b * y) % p, v = (c * x + d * y) % p;
                    perm[x + p * y - 1] = static_cast<int32_t>(u + p * v - 1);
                }
            return perm;
        };
        return relabel(group_from_permutations({act(1, 1, 0, 1), act(0, p - 1, 1, 0)}, cap));
    }
    char kind = name.empty() ? '?' : name[0];
    if (kind == 'C') return relabel(group_from_abelian_invariants({num(1)}, cap));
    if (kind == 'S') {
        long n = num(1);
        if (n < 2) return relabel(group_from_abelian_invariants({1}, cap));
        std::vector<int32_t> cyc(n), swp(n);
        std::iota(cyc.begin(), cyc.end(), 0);
        std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
        std::iota(swp.begin(), swp.end(), 0);
        std::swap(swp[0], swp[1]);
        return relabel(group_from_permutations({swp, cyc}, cap));
    }
    if (kind == 'A') {
        long n = num(1);
        if (n < 3) return relabel(group_from_abelian_invariants({1}, cap));
        std::vector<int32_t> three(n), cyc(n);
        std::iota(three.begin(), three.end(), 0);
        three[0] = 1;
        three[1] = 2;
        three[2] = 0;
        std::iota(cyc.begin(), cyc.end(), 0);
        if (n % 2 == 1) {
            std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
        } else {
            std::rotate(cyc.begin() + 1, cyc.begin() + 2, cyc.end());
        }
        return relabel(group_from_permutations({three, cyc}, cap));
    }
    if (kind == 'D') {
        long n = num(1);
        if (n == 1) return relabel(group_from_abelian_invariants({2}, cap));
        if (n == 2) return relabel(group_from_abelian_invariants({2, 2}, cap));
        std::vector<int32_t> rot(n), ref(n);
        for (long i = 0; i < n; ++i) {
            rot[i] = static_cast<int32_t>((i + 1) % n);
            ref[i] = static_cast<int32_t>((n - i) % n);
        }
        return relabel(group_from_permutations({rot, ref}, cap));
    }
    throw std::invalid_argument("unknown group name: " + name);
}

// Full associativity check for small groups, random triples above order 64.
inline bool check_group_axioms(const FiniteGroup& g, uint64_t seed = 0) {
    long n = g.order;
    for (int32_t a = 0; a < n; ++a) {
        if (g.mul(FiniteGroup::identity, a) != a || g.mul(a, FiniteGroup::identity) != a) return false;
        if (g.mul(a, g.inv(a)) != FiniteGroup::identity) return false;
    }
    auto triple = [&](int32_t a, int32_t b, int32_t c) {
        return g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c));
    };
    if (n <= 64) {
        for (int32_t a = 0; a < n; ++a)
            for (int32_t b = 0; b < n; ++b)
                for (int32_t c = 0; c < n; ++c)
                    if (!triple(a, b, c)) return false;
    } else {
        Rng rng(seed);
        std::uniform_int_distribution<int32_t> dist(0, static_cast<int32_t>(n - 1));
        for (int i = 0; i < 10000; ++i)
            if (!triple(dist(rng), dist(rng), dist(rng))) return false;
    }
    for (int32_t a = 0; a < n; ++a) {
        long k = 1;
        int32_t x = a;
        while (x != FiniteGroup::identity) {
            x = g.mul(x, a);
            ++k;
        }
        if (g.element_orders[a] != k) return false;
    }
    return true;
}

namespace detail {

// Subgroup generated by the elements of `mask`.
inline ElementMask subgroup_closure(const FiniteGroup& g, const ElementMask& mask) {
    ElementMask out(g.order);
    std::vector<int32_t> elems;
    out.set(FiniteGroup::identity);
    elems.push_back(FiniteGroup::identity);
    std::vector<int32_t> queue = mask.elements();
    for (int32_t x : queue)
        if (!out.test(x)) {
            out.set(x);
            elems.push_back(x);
        }
    for (std::size_t head = 0; head < elems.size(); ++head) {
        int32_t x = elems[head];
        for (std::size_t i = 0; i <= head; ++i) {
            int32_t y = elems[i];
            for (int32_t z : {g.mul(x, y), g.mul(y, x)}) {
                if (!out.test(z)) {
                    out.set(z);
                    elems.push_back(z);
                }
            }
        }
    }
    return out;
}

inline Subgroup subgroup_from_mask(const GroupPtr& g, const ElementMask& m) {
    return Subgroup{g, m.elements()};
}

}  // namespace detail

inline std::vector<ElementMask> cyclic_subgroup_masks(const FiniteGroup& g) {
    std::unordered_set<ElementMask, ElementMaskHash> seen;
    std::vector<ElementMask> out;
    for (int32_t x = 0; x < g.order; ++x) {
        ElementMask m(g.order);
        int32_t y = x;
        m.set(FiniteGroup::identity);
        while (y != FiniteGroup::identity) {
            m.set(y);
            y = g.mul(y, x);
        }
        if (seen.insert(m).second) out.push_back(m);
    }
    return out;
}

// All subgroups (or all cyclic subgroups) of index at most max_index, sorted
// by (order, elements lexicographic). Enumeration is bottom-up: cyclic seeds,
// then closure under joins with cyclic subgroups.
inline std::vector<Subgroup> all_subgroups(const GroupPtr& g,
                                           std::optional<long> max_index = std::nullopt,
                                           bool cyclic_only = false) {
    if (g->order > default_order_cap())
        throw cap_exceeded("subgroup enumeration above order cap");
    std::vector<ElementMask> cyclic = cyclic_subgroup_masks(*g);
    std::vector<ElementMask> found = cyclic;
    if (!cyclic_only) {
        std::unordered_set<ElementMask, ElementMaskHash> seen(found.begin(), found.end());
        for (std::size_t head = 0; head < found.size(); ++head) {
            ElementMask base = found[head];
            if (base.count() == g->order) continue;
            for (const ElementMask& c : cyclic) {
                if (base.contains(c)) continue;
                ElementMask join(g->order);
                for (int32_t e : base.elements()) join.set(e);
                for (int32_t e : c.elements()) join.set(e);
                ElementMask closed = detail::subgroup_closure(*g, join);
                if (seen.insert(closed).second) found.push_back(closed);
            }
        }
    }
    std::vector<Subgroup> out;
    for (const ElementMask& m : found) {
        Subgroup s = detail::subgroup_from_mask(g, m);
        if (max_index && g->order / s.order() > *max_index) continue;
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
        if (a.order() != b.order()) return a.order() < b.order();
        return a.elements < b.elements;
    });
    return out;
}

inline Subgroup trivial_subgroup(const GroupPtr& g) { return Subgroup{g, {FiniteGroup::identity}}; }

inline Subgroup full_subgroup(const GroupPtr& g) {
    std::vector<int32_t> all(g->order);
    std::iota(all.begin(), all.end(), 0);
    return Subgroup{g, all};
}

inline Subgroup generated_subgroup(const GroupPtr& g, const std::vector<int32_t>& gens) {
    ElementMask m(g->order);
    for (int32_t x : gens) m.set(x);
    return detail::subgroup_from_mask(g, detail::subgroup_closure(*g, m));
}

inline Subgroup conjugate_subgroup(const Subgroup& h, int32_t x) {
    const FiniteGroup& g = *h.parent;
    std::vector<int32_t> elems;
    elems.reserve(h.elements.size());
    int32_t xi = g.inv(x);
    for (int32_t e : h.elements) elems.push_back(g.mul(g.mul(x, e), xi));
    std::sort(elems.begin(), elems.end());
    return Subgroup{h.parent, std::move(elems)};
}

inline Subgroup normalizer(const GroupPtr& g, const Subgroup& h) {
    ElementMask hm = h.mask();
    std::vector<int32_t> elems;
    for (int32_t x = 0; x < g->order; ++x) {
        int32_t xi = g->inv(x);
        bool ok = true;
        for (int32_t e : h.elements)
            if (!hm.test(g->mul(g->mul(x, e), xi))) {
                ok = false;
                break;
            }
        if (ok) elems.push_back(x);
    }
    return Subgroup{g, std::move(elems)};
}

enum class CosetSide { left, right };

// One representative per coset, the smallest element index in each.
inline std::vector<int32_t> coset_representatives(const GroupPtr& g, const Subgroup& h,
                                                  CosetSide side) {
    std::vector<bool> covered(g->order, false);
    std::vector<int32_t> reps;
    for (int32_t x = 0; x < g->order; ++x) {
        if (covered[x]) continue;
        reps.push_back(x);
        for (int32_t e : h.elements)
            covered[side == CosetSide::left ? g->mul(x, e) : g->mul(e, x)] = true;
    }
    return reps;
}

struct AbelianStructure {
    std::vector<long> invariant_factors;       // d_1 | d_2 | ... | d_k, each >= 2
    std::vector<int32_t> generator_elements;   // generator of order d_i for each factor
    long largest_cyclic_order = 1;
    // For each prime p | |G|: the p-part G_p and the coprime part G_{p'}.
    std::map<long, std::pair<Subgroup, Subgroup>> primary_parts;
};

inline AbelianStructure abelian_structure(const GroupPtr& g) {
    if (!g->is_abelian()) throw std::invalid_argument("abelian_structure: group is not abelian");
    AbelianStructure out;
    long n = g->order;
    if (n == 1) return out;
    auto primes = factorize(n);
    // p-exponent partitions from counts of p^i-torsion elements
    std::map<long, std::vector<int>> partitions;  // p -> e_1 >= e_2 >= ...
    for (auto& [p, e] : primes) {
        std::vector<long> torsion_count(e + 1, 0);
        for (int32_t x = 0; x < n; ++x) {
            long o = g->element_orders[x];
            for (int i = 0; i <= e; ++i) {
                long pi = 1;
                for (int k = 0; k < i; ++k) pi *= p;
                if (pi % o == 0) ++torsion_count[i];
            }
        }
        auto logp = [&](long v) {
            int k = 0;
            while (v > 1) {
                v /= p;
                ++k;
            }
            return k;
        };
        std::vector<int>& part = partitions[p];
        for (int i = 1; i <= e; ++i) {
            int cnt = logp(torsion_count[i]) - logp(torsion_count[i - 1]);
            for (int j = 0; j < cnt; ++j) {
                if (static_cast<int>(part.size()) < j + 1) part.push_back(0);
                ++part[j];
            }
        }
        std::sort(part.begin(), part.end(), std::greater<int>());
    }
    // greedy independent generators per prime
    std::map<long, std::vector<int32_t>> pgens;
    for (auto& [p, part] : partitions) {
        std::vector<int32_t> gens;
        ElementMask span(n);
        span.set(FiniteGroup::identity);
        long span_order = 1;
        for (int e : part) {
            long want = 1;
            for (int k = 0; k < e; ++k) want *= p;
            bool placed = false;
            for (int32_t x = 0; x < n && !placed; ++x) {
                if (g->element_orders[x] != want) continue;
                ElementMask joined = span;
                joined.set(x);
                ElementMask closed = detail::subgroup_closure(*g, joined);
                if (closed.count() == span_order * want) {
                    gens.push_back(x);
                    span = closed;
                    span_order *= want;
                    placed = true;
                }
            }
            if (!placed) throw verification_failure("abelian basis construction failed");
        }
        pgens[p] = gens;
    }
    std::size_t k = 0;
    for (auto& [p, part] : partitions) k = std::max(k, part.size());
    // rank j (0 = largest) combines the j-th factor of each primary part
    std::vector<long> factors;
    std::vector<int32_t> gens;
    for (std::size_t j = 0; j < k; ++j) {
        long d = 1;
        int32_t gen = FiniteGroup::identity;
        for (auto& [p, part] : partitions) {
            if (j >= part.size()) continue;
            long q = 1;
            for (int t = 0; t < part[j]; ++t) q *= p;
            d *= q;
            gen = g->mul(gen, pgens[p][j]);
        }
        factors.push_back(d);
        gens.push_back(gen);
    }
    std::reverse(factors.begin(), factors.end());
    std::reverse(gens.begin(), gens.end());
    out.invariant_factors = factors;
    out.generator_elements = gens;
    out.largest_cyclic_order = factors.back();
    for (auto& [p, e] : primes) {
        std::vector<int32_t> ppart, pprime;
        for (int32_t x = 0; x < n; ++x) {
            long o = g->element_orders[x];
            bool ppower = true;
            long v = o;
            while (v % p == 0) v /= p;
            ppower = (v == 1);
            if (ppower) ppart.push_back(x);
            if (o % p != 0) pprime.push_back(x);
        }
        out.primary_parts.emplace(p, std::make_pair(Subgroup{g, ppart}, Subgroup{g, pprime}));
    }
    return out;
}

// True iff G contains a non-cyclic subgroup of order pq (p, q prime, possibly
// equal); returns a witness when it does.
inline std::optional<Subgroup> find_noncyclic_pq_subgroup(const GroupPtr& g) {
    auto primes = prime_support(g->order);
    std::map<long, std::vector<int32_t>> by_order;
    for (int32_t x = 0; x < g->order; ++x) {
        long o = g->element_orders[x];
        if (is_prime(o)) by_order[o].push_back(x);
    }
    for (long p : primes)
        for (long q : primes) {
            if (q < p) continue;
            if (g->order % (p * q) != 0) continue;
            const auto& xs = by_order[p];
            const auto& ys = by_order[q];
            for (int32_t x : xs)
                for (int32_t y : ys) {
                    if (x == y) continue;
                    Subgroup s = generated_subgroup(g, {x, y});
                    if (s.order() != p * q) continue;
                    if (!s.is_cyclic()) return s;
                }
        }
    return std::nullopt;
}

// Extracts a subgroup as a standalone group. `embedding[i]` is the parent
// element index of the new element i; the identity stays at 0.
struct ExtractedGroup {
    GroupPtr group;
    std::vector<int32_t> embedding;
};

inline ExtractedGroup subgroup_as_group(const Subgroup& h, std::string label = "") {
    const FiniteGroup& p = *h.parent;
    long n = h.order();
    std::unordered_map<int32_t, int32_t> to_new;
    for (long i = 0; i < n; ++i) to_new[h.elements[i]] = static_cast<int32_t>(i);
    auto g = std::make_shared<FiniteGroup>();
    g->order = n;
    g->label = label.empty() ? p.label + "-sub" + std::to_string(n) : std::move(label);
    g->table.assign(static_cast<std::size_t>(n) * n, 0);
    for (long a = 0; a < n; ++a)
        for (long b = 0; b < n; ++b)
            g->table[a * n + b] = to_new.at(p.mul(h.elements[a], h.elements[b]));
    detail::finish_group(*g);
    return ExtractedGroup{g, h.elements};
}

}  // namespace normrel
