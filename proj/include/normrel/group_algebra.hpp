#pragma once

// Exact arithmetic in R[G] for R in {Q, Z, F_p} and the two-sided-ideal
// linear algebra behind the relation criteria. Coefficients are stored as
// exact rationals; the integer and prime-field rings constrain them
// (denominator 1, respectively residues in [0, p)).

#include <optional>
#include <utility>
#include <vector>

#include "normrel/group.hpp"
#include "normrel/linalg.hpp"

namespace normrel {

struct Ring {
    enum class Kind { rationals, integers, prime_field };
    Kind kind = Kind::rationals;
    long p = 0;

    static Ring Q() { return Ring{Kind::rationals, 0}; }
    static Ring Z() { return Ring{Kind::integers, 0}; }
    static Ring Fp(long p) {
        if (!is_prime(p)) throw std::invalid_argument("prime_field needs a prime modulus");
        return Ring{Kind::prime_field, p};
    }
    bool operator==(const Ring& o) const { return kind == o.kind && p == o.p; }
};

struct AlgebraElement {
    GroupPtr group;
    Ring ring;
    std::vector<mpq_class> coeffs;  // length |G|

    static AlgebraElement zero(const GroupPtr& g, Ring ring) {
        return AlgebraElement{g, ring, std::vector<mpq_class>(g->order, 0)};
    }
    static AlgebraElement one(const GroupPtr& g, Ring ring) {
        AlgebraElement e = zero(g, ring);
        e.coeffs[FiniteGroup::identity] = 1;
        return e;
    }
    static AlgebraElement of_element(const GroupPtr& g, int32_t x, Ring ring) {
        AlgebraElement e = zero(g, ring);
        e.coeffs[x] = 1;
        return e;
    }

    bool is_zero() const {
        for (const auto& c : coeffs)
            if (c != 0) return false;
        return true;
    }

    void reduce() {
        if (ring.kind != Ring::Kind::prime_field) return;
        for (auto& c : coeffs) {
            mpz_class num = c.get_num() % ring.p;
            if (num < 0) num += ring.p;
            c = mpq_class(num);
        }
    }
};

inline void require_compatible(const AlgebraElement& x, const AlgebraElement& y) {
    if (x.group.get() != y.group.get() || x.group->order != y.group->order)
        throw std::invalid_argument("algebra elements over different groups");
    if (!(x.ring == y.ring)) throw std::invalid_argument("algebra elements over different rings");
}

inline AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y) {
    require_compatible(x, y);
    AlgebraElement out = x;
    for (long i = 0; i < x.group->order; ++i) out.coeffs[i] += y.coeffs[i];
    out.reduce();
    return out;
}

// Convolution product: (xy)_g = sum over uv = g of x_u y_v.
inline AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) {
    require_compatible(x, y);
    const FiniteGroup& g = *x.group;
    AlgebraElement out = AlgebraElement::zero(x.group, x.ring);
    for (int32_t u = 0; u < g.order; ++u) {
        if (x.coeffs[u] == 0) continue;
        for (int32_t v = 0; v < g.order; ++v) {
            if (y.coeffs[v] == 0) continue;
            out.coeffs[g.mul(u, v)] += x.coeffs[u] * y.coeffs[v];
        }
    }
    out.reduce();
    return out;
}

inline AlgebraElement scalar_multiply(const mpq_class& c, const AlgebraElement& x) {
    AlgebraElement out = x;
    for (auto& v : out.coeffs) v *= c;
    out.reduce();
    return out;
}

// N_H: coefficient 1 on each element of the subgroup.
inline AlgebraElement norm_element(const Subgroup& h, Ring ring) {
    AlgebraElement out = AlgebraElement::zero(h.parent, ring);
    for (int32_t e : h.elements) out.coeffs[e] = 1;
    out.reduce();
    return out;
}

// One generator g * N_H * h of the two-sided ideal, identified by the
// subgroup and a pair of translation elements.
struct IdealGenerator {
    Subgroup subgroup;
    int32_t left;
    int32_t right;

    // Support of left * N_H * right, sorted.
    std::vector<int32_t> support() const {
        const FiniteGroup& g = *subgroup.parent;
        std::vector<int32_t> out;
        out.reserve(subgroup.elements.size());
        for (int32_t e : subgroup.elements) out.push_back(g.mul(g.mul(left, e), right));
        std::sort(out.begin(), out.end());
        return out;
    }
};

// The generating family g N_H h with g over left cosets of H and h over right
// cosets of the normalizer of H, deduplicated by support (families that
// contain conjugate subgroups produce coinciding translates).
inline std::vector<IdealGenerator> norm_translate_family(const GroupPtr& g,
                                                         const std::vector<Subgroup>& subgroups) {
    std::vector<IdealGenerator> out;
    std::unordered_set<ElementMask, ElementMaskHash> seen;
    for (const Subgroup& h : subgroups) {
        Subgroup nh = normalizer(g, h);
        std::vector<int32_t> lefts = coset_representatives(g, h, CosetSide::left);
        std::vector<int32_t> rights = coset_representatives(g, nh, CosetSide::right);
        for (int32_t gg : lefts)
            for (int32_t hh : rights) {
                IdealGenerator gen{h, gg, hh};
                ElementMask m(g->order);
                for (int32_t e : gen.support()) m.set(e);
                if (seen.insert(m).second) out.push_back(std::move(gen));
            }
    }
    return out;
}

struct IdealBasis {
    Ring ring;
    std::vector<IdealGenerator> generators_used;
    long rank = 0;
    // Echelonized basis rows: integer rows spanning the ideal over Q, or
    // reduced rows over F_p.
    ZMat zbasis;
    std::vector<std::vector<long>> pbasis;
    // Builders retained for membership queries with certificates.
    std::shared_ptr<LatticeBuilder> zbuilder;
    std::shared_ptr<FpBuilder> pbuilder;
};

// Echelon basis of the span of the g N_H h family over Q or F_p.
inline IdealBasis two_sided_ideal_basis(const GroupPtr& g, const std::vector<Subgroup>& subgroups,
                                        Ring ring) {
    if (ring.kind == Ring::Kind::integers)
        throw std::invalid_argument("two_sided_ideal_basis: use Q or F_p (integer lattice lives in the relation engine)");
    IdealBasis out;
    out.ring = ring;
    out.generators_used = norm_translate_family(g, subgroups);
    long n = g->order;
    if (ring.kind == Ring::Kind::rationals) {
        // identity coordinate processed last, so the intersection with the
        // line Q*1 is read off a single pivot
        out.zbuilder = std::make_shared<LatticeBuilder>(
            n, column_order_with_last(n, FiniteGroup::identity), true);
        for (const auto& gen : out.generators_used) {
            ZVec v(n, 0);
            for (int32_t e : gen.support()) v[e] = 1;
            out.zbuilder->insert(std::move(v));
        }
        out.zbasis = out.zbuilder->basis();
        out.rank = static_cast<long>(out.zbuilder->rank());
    } else {
        out.pbuilder = std::make_shared<FpBuilder>(n, ring.p, true);
        for (const auto& gen : out.generators_used) {
            std::vector<long> v(n, 0);
            for (int32_t e : gen.support()) v[e] = (v[e] + 1) % ring.p;
            out.pbuilder->insert(std::move(v));
        }
        out.rank = static_cast<long>(out.pbuilder->rank());
    }
    return out;
}

// Does the ideal contain 1? When it does, the certificate gives coefficients
// against generators_used whose combination is exactly the identity element.
struct OneCertificate {
    bool contained = false;
    std::vector<std::pair<std::size_t, mpq_class>> coefficients;
};

inline OneCertificate contains_one(const IdealBasis& basis) {
    OneCertificate cert;
    if (basis.generators_used.empty()) return cert;
    long n = basis.generators_used[0].subgroup.parent->order;
    if (basis.ring.kind == Ring::Kind::rationals) {
        // 1 lies in the Q-span iff the integer lattice meets the identity
        // line, iff the echelon basis has a row supported on the identity
        // alone. Its pivot d yields the certificate after scaling by 1/d.
        mpz_class d = basis.zbuilder->last_line_pivot();
        if (d == 0) return cert;
        cert.contained = true;
        for (const auto& [idx, c] : basis.zbuilder->last_line_combo())
            cert.coefficients.emplace_back(idx, mpq_class(c) / mpq_class(d));
        return cert;
    }
    if (basis.ring.kind == Ring::Kind::prime_field) {
        std::vector<long> target(n, 0);
        target[FiniteGroup::identity] = 1;
        auto combo = basis.pbuilder->represent(target);
        if (combo) {
            cert.contained = true;
            for (std::size_t i = 0; i < combo->size(); ++i)
                if ((*combo)[i] != 0) cert.coefficients.emplace_back(i, mpq_class((*combo)[i]));
        }
        return cert;
    }
    throw std::invalid_argument("contains_one requires a field");
}

// Reassembles a certificate into an element of R[G]; the identity check
// "multiply out and compare" lives in tests and callers.
inline AlgebraElement assemble_certificate(const IdealBasis& basis, const OneCertificate& cert) {
    const GroupPtr& g = basis.generators_used[0].subgroup.parent;
    AlgebraElement acc = AlgebraElement::zero(g, basis.ring);
    for (const auto& [idx, c] : cert.coefficients) {
        for (int32_t e : basis.generators_used[idx].support()) acc.coeffs[e] += c;
    }
    acc.reduce();
    return acc;
}

}  // namespace normrel
