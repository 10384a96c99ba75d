#pragma once

// Character duality for finite abelian groups and the explicit scalar norm
// relations this yields: the Funakura relation R_G of a non-cyclic abelian
// group, and the denominator/index-optimal relations built from it.
//
// Characters are exponent tuples over the invariant-factor generators; all
// evaluations happen through the integer pairing
//   <t, m> = sum_i t_i m_i (d_k / d_i)  mod d_k,
// so no root of unity is ever represented numerically.

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "normrel/relations.hpp"

namespace normrel {

struct Character {
    GroupPtr group;               // the abelian group G
    std::vector<long> exponents;  // one residue per invariant-factor generator
    long order = 1;               // lcm of the per-coordinate orders
};

class DualityTable {
public:
    explicit DualityTable(const GroupPtr& g)
        : group_(g), structure_(abelian_structure(g)) {
        long n = g->order;
        const auto& inv = structure_.invariant_factors;
        exponent_ = inv.empty() ? 1 : inv.back();
        // decompose every element over the generators by enumerating tuples
        element_tuples_.assign(n, {});
        std::vector<long> tuple(inv.size(), 0);
        for (long count = 0; count < n; ++count) {
            int32_t e = FiniteGroup::identity;
            for (std::size_t i = 0; i < inv.size(); ++i)
                e = g->mul(e, g->power(structure_.generator_elements[i], tuple[i]));
            element_tuples_[e] = tuple;
            for (std::size_t i = 0; i < inv.size(); ++i) {
                if (++tuple[i] < inv[i]) break;
                tuple[i] = 0;
            }
        }
        dual_ = group_from_abelian_invariants(inv.empty() ? std::vector<long>{1} : inv);
        characters_.reserve(n);
        for (long idx = 0; idx < n; ++idx) {
            Character chi{g, tuple_of_index(idx), 1};
            for (std::size_t i = 0; i < inv.size(); ++i) {
                long per = inv[i] / std::gcd(inv[i], chi.exponents[i]);
                chi.order = std::lcm(chi.order, per);
            }
            characters_.push_back(std::move(chi));
        }
    }

    const GroupPtr& group() const { return group_; }
    const GroupPtr& dual() const { return dual_; }
    const AbelianStructure& structure() const { return structure_; }
    const std::vector<Character>& characters() const { return characters_; }
    const Character& character(long dual_index) const { return characters_[dual_index]; }

    // <chi, x> as a residue mod the group exponent; chi(x) = 1 iff this is 0.
    long pairing(const std::vector<long>& chi_tuple, int32_t x) const {
        const auto& inv = structure_.invariant_factors;
        const auto& xt = element_tuples_[x];
        long acc = 0;
        for (std::size_t i = 0; i < inv.size(); ++i)
            acc = (acc + chi_tuple[i] % inv[i] * ((exponent_ / inv[i]) * (xt[i] % inv[i]) % exponent_)) % exponent_;
        return acc;
    }

    bool evaluates_to_one(long dual_index, int32_t x) const {
        return pairing(characters_[dual_index].exponents, x) == 0;
    }

    // H^perp: for a subgroup of G it lives in the dual, for a subgroup of the
    // dual it lives in G (the pairing is symmetric in the two tuples).
    Subgroup perp(const Subgroup& h) const {
        bool of_group = h.parent.get() == group_.get();
        if (!of_group && h.parent.get() != dual_.get())
            throw std::invalid_argument("perp: subgroup belongs to neither side of the duality");
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = perp_cache_.find({of_group, h.elements});
            if (it != perp_cache_.end())
                return Subgroup{of_group ? dual_ : group_, it->second};
        }
        const GroupPtr& target = of_group ? dual_ : group_;
        std::vector<int32_t> elems;
        for (int32_t c = 0; c < target->order; ++c) {
            bool all_one = true;
            for (int32_t x : h.elements) {
                long pair = of_group ? pairing(tuple_of_index(c), x) : pairing(tuple_of_index(x), c);
                if (pair != 0) {
                    all_one = false;
                    break;
                }
            }
            if (all_one) elems.push_back(c);
        }
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            perp_cache_[{of_group, h.elements}] = elems;
        }
        return Subgroup{target, std::move(elems)};
    }

    // ker chi as a subgroup of G.
    Subgroup kernel(long dual_index) const {
        std::vector<int32_t> elems;
        for (int32_t x = 0; x < group_->order; ++x)
            if (evaluates_to_one(dual_index, x)) elems.push_back(x);
        return Subgroup{group_, std::move(elems)};
    }

    std::vector<long> tuple_of_index(long idx) const {
        const auto& inv = structure_.invariant_factors;
        std::vector<long> t(inv.size());
        for (std::size_t i = 0; i < inv.size(); ++i) {
            t[i] = idx % inv[i];
            idx /= inv[i];
        }
        return t;
    }

    long index_of_tuple(const std::vector<long>& t) const {
        const auto& inv = structure_.invariant_factors;
        long idx = 0, stride = 1;
        for (std::size_t i = 0; i < inv.size(); ++i) {
            idx += (t[i] % inv[i]) * stride;
            stride *= inv[i];
        }
        return idx;
    }

private:
    GroupPtr group_;
    AbelianStructure structure_;
    long exponent_ = 1;
    GroupPtr dual_;
    std::vector<std::vector<long>> element_tuples_;
    std::vector<Character> characters_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<bool, std::vector<int32_t>>, std::vector<int32_t>> perp_cache_;
};

inline DualityTable dual_group(const GroupPtr& g) { return DualityTable(g); }

enum class CoefficientFormula { moebius, product };

namespace detail {

// Is chi a p-th power in the dual? Coordinatewise divisibility test.
inline bool is_pth_power(const DualityTable& t, const Character& chi, long p) {
    const auto& inv = t.structure().invariant_factors;
    for (std::size_t i = 0; i < inv.size(); ++i)
        if (inv[i] % p == 0 && chi.exponents[i] % p != 0) return false;
    return true;
}

inline long p_rank(const DualityTable& t, long p) {
    long r = 0;
    for (long d : t.structure().invariant_factors)
        if (d % p == 0) ++r;
    return r;
}

}  // namespace detail

// Coefficient of N_{ker chi} in the relation R_G, by either of the two
// closed forms; they agree and tests cross-check them.
inline mpq_class funakura_coefficient(const DualityTable& t, const Character& chi,
                                      CoefficientFormula formula) {
    const GroupPtr& g = t.group();
    if (g->order == 1 || t.structure().invariant_factors.size() < 2)
        throw std::invalid_argument("funakura_coefficient: group must be non-cyclic abelian");
    long n = g->order;
    long c = chi.order;
    if (formula == CoefficientFormula::product) {
        mpq_class a = make_q(c, n);
        for (auto& [p, e] : factorize(c)) {
            long rp = detail::p_rank(t, p);
            long delta = detail::is_pth_power(t, chi, p) ? 1 : 0;
            mpz_class pr = 1;
            for (long i = 0; i + 1 < rp; ++i) pr *= p;
            a *= mpq_class(1 - pr * delta);
        }
        for (auto& [p, e] : factorize(n)) {
            if (c % p == 0) continue;
            long rp = detail::p_rank(t, p);
            mpz_class sum = 0, pw = 1;
            for (long i = 1; i < rp; ++i) {
                pw *= p;
                sum += pw;
            }
            a *= mpq_class(-sum);
        }
        return a;
    }
    // Moebius form: (1/|ker chi|) sum over cyclic C' >= C = <chi> of mu([C':C])
    long chi_index = t.index_of_tuple(chi.exponents);
    Subgroup c_sub = generated_subgroup(t.dual(), {static_cast<int32_t>(chi_index)});
    std::set<std::vector<int32_t>> seen;
    long sum = 0;
    for (int32_t psi = 0; psi < t.dual()->order; ++psi) {
        Subgroup cp = generated_subgroup(t.dual(), {psi});
        if (!seen.insert(cp.elements).second) continue;
        if (!std::includes(cp.elements.begin(), cp.elements.end(), c_sub.elements.begin(),
                           c_sub.elements.end()))
            continue;
        sum += moebius(cp.order() / c_sub.order());
    }
    long ker_order = n / c;
    return make_q(sum, ker_order);
}

// The relation R_G: 1 = sum over cyclic C = <chi> of a_{ker chi} N_{ker chi},
// returned with denominators cleared. Requires G non-cyclic abelian.
inline ScalarRelation funakura_relation(const GroupPtr& g) {
    DualityTable t(g);
    if (t.structure().invariant_factors.size() < 2)
        throw std::invalid_argument("funakura_relation: group must be non-cyclic abelian");
    // one generator per cyclic subgroup of the dual; kernels accumulate
    std::set<std::vector<int32_t>> seen;
    std::map<std::vector<int32_t>, mpq_class> by_kernel;
    std::map<std::vector<int32_t>, Subgroup> kernel_sub;
    for (int32_t psi = 0; psi < t.dual()->order; ++psi) {
        Subgroup cp = generated_subgroup(t.dual(), {psi});
        if (!seen.insert(cp.elements).second) continue;
        mpq_class a = funakura_coefficient(t, t.character(psi), CoefficientFormula::product);
        if (a == 0) continue;
        Subgroup ker = t.kernel(psi);
        by_kernel[ker.elements] += a;
        kernel_sub.emplace(ker.elements, ker);
    }
    mpz_class den = 1;
    for (const auto& [k, a] : by_kernel) den = lcm(den, a.get_den());
    ScalarRelation rel{g, den, {}};
    for (const auto& [k, a] : by_kernel) {
        mpq_class scaled = a * den;
        if (scaled == 0) continue;
        rel.coefficients.emplace_back(kernel_sub.at(k), scaled.get_num());
    }
    if (!verify_scalar_relation(rel))
        throw verification_failure("Funakura relation failed its exact re-check");
    return rel;
}

struct OptimalAbelianRelation {
    ScalarRelation relation;
    long n0 = 1;               // smallest index bound admitting such a relation
    bool denominator_one = false;
};

namespace detail {

// Pulls a scalar relation on an extracted subgroup back to the parent group:
// the subalgebra Q[H] sits inside Q[G] with the same identity.
inline ScalarRelation pull_back(const GroupPtr& parent, const ExtractedGroup& ex,
                                const ScalarRelation& rel) {
    ScalarRelation out{parent, rel.denominator, {}};
    for (const auto& [h, c] : rel.coefficients) {
        std::vector<int32_t> elems;
        elems.reserve(h.elements.size());
        for (int32_t e : h.elements) elems.push_back(ex.embedding[e]);
        std::sort(elems.begin(), elems.end());
        out.coefficients.emplace_back(Subgroup{parent, std::move(elems)}, c);
    }
    return out;
}

}  // namespace detail

// Optimal relations of abelian groups: write G = C x Q with C the largest
// cyclic factor. Absent iff Q = 1. If |Q| has two distinct prime divisors,
// a denominator-1 relation with subgroup indices <= n0 = |C| max_p |Q_p|,
// assembled as a Bezout combination of the R_{G_{p'}}. If Q is a nontrivial
// p-group, the relation R_{G_p} with denominator |G_p|/p and n0 = |C|.
inline std::optional<OptimalAbelianRelation> optimal_abelian_relation(const GroupPtr& g) {
    AbelianStructure st = abelian_structure(g);
    if (st.invariant_factors.size() < 2) return std::nullopt;  // cyclic (or trivial)
    long c_order = st.largest_cyclic_order;
    long q_order = g->order / c_order;
    auto q_primes = prime_support(q_order);
    OptimalAbelianRelation out{ScalarRelation{g, 1, {}}, 1, false};
    if (q_primes.size() >= 2) {
        // denominator 1: Bezout across the coprime parts
        std::vector<long> primes;
        for (auto& [p, e] : factorize(g->order)) primes.push_back(p);
        std::vector<ScalarRelation> parts;
        std::vector<mpz_class> dens;
        for (long p : primes) {
            const Subgroup& gp_prime = st.primary_parts.at(p).second;
            ExtractedGroup ex = subgroup_as_group(gp_prime);
            ScalarRelation rp = detail::pull_back(g, ex, funakura_relation(ex.group));
            dens.push_back(rp.denominator);
            parts.push_back(std::move(rp));
        }
        // 1 = sum u_p d_p, extended gcd applied in increasing prime order
        std::vector<mpz_class> u(dens.size(), 0);
        mpz_class running = dens[0];
        u[0] = 1;
        for (std::size_t i = 1; i < dens.size(); ++i) {
            mpz_class s, v;
            mpz_class gg = ext_gcd(running, dens[i], s, v);
            for (std::size_t j = 0; j < i; ++j) u[j] *= s;
            u[i] = v;
            running = gg;
        }
        if (running != 1) throw verification_failure("Bezout identity across coprime parts failed");
        std::map<std::vector<int32_t>, mpz_class> coeff;
        std::map<std::vector<int32_t>, Subgroup> subs;
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (const auto& [h, b] : parts[i].coefficients) {
                coeff[h.elements] += u[i] * b;
                subs.emplace(h.elements, h);
            }
        ScalarRelation rel{g, 1, {}};
        for (const auto& [k, b] : coeff)
            if (b != 0) rel.coefficients.emplace_back(subs.at(k), b);
        if (!verify_scalar_relation(rel))
            throw verification_failure("optimal abelian relation failed its exact re-check");
        long max_qp = 1;
        for (long p : q_primes) {
            long qp = st.primary_parts.at(p).first.order() /
                      std::gcd(st.primary_parts.at(p).first.order(), [&] {
                          long cp = 1;
                          long v = c_order;
                          while (v % p == 0) {
                              cp *= p;
                              v /= p;
                          }
                          return cp;
                      }());
            max_qp = std::max(max_qp, qp);
        }
        out.relation = std::move(rel);
        out.n0 = c_order * max_qp;
        out.denominator_one = true;
        return out;
    }
    // Q a nontrivial p-group
    long p = *q_primes.begin();
    const Subgroup& gp = st.primary_parts.at(p).first;
    ExtractedGroup ex = subgroup_as_group(gp);
    ScalarRelation rel = detail::pull_back(g, ex, funakura_relation(ex.group));
    if (!verify_scalar_relation(rel))
        throw verification_failure("optimal abelian relation failed its exact re-check");
    if (rel.denominator != gp.order() / p)
        throw verification_failure("p-group relation denominator differs from |G_p|/p");
    out.relation = std::move(rel);
    out.n0 = c_order;
    out.denominator_one = false;  // |G_p|/p >= p here
    return out;
}

}  // namespace normrel
