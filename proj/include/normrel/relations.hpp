#pragma once

// Norm relations: search, optimal denominators, classification, and the
// translation between scalar norm relations and Brauer relations.
//
// Everything reduces to integer lattices spanned by translates of norm
// elements. Writing g N_H h = (gh) N_{H^h} turns the two-sided ideal into a
// plain Z-span of coset indicator vectors, and a Hermite echelon with the
// identity coordinate ordered last answers both "does a relation exist" and
// "what is the optimal denominator", with a witness combination on the side.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "normrel/group_algebra.hpp"

namespace normrel {

struct NormRelationTerm {
    AlgebraElement a;  // over Z
    Subgroup subgroup;
    AlgebraElement b;  // over Z
};

struct NormRelation {
    GroupPtr group;
    mpz_class denominator;
    std::vector<NormRelationTerm> terms;
};

struct ScalarRelation {
    GroupPtr group;
    mpz_class denominator;
    std::vector<std::pair<Subgroup, mpz_class>> coefficients;  // nontrivial subgroups
};

struct BrauerRelation {
    GroupPtr group;
    std::vector<std::pair<Subgroup, mpq_class>> coefficients;  // trivial subgroup allowed
};

// Permutation character value Ind_{G/H}(1_H)(x) as a fixed-coset count.
inline long induced_trivial_character(const Subgroup& h, int32_t x) {
    const FiniteGroup& g = *h.parent;
    long fixed = 0;
    for (int32_t r : coset_representatives(h.parent, h, CosetSide::left)) {
        // x fixes the coset rH iff r^{-1} x r lies in H
        if (h.contains(g.mul(g.mul(g.inv(r), x), r))) ++fixed;
    }
    return fixed;
}

inline AlgebraElement relation_sum(const NormRelation& rel) {
    AlgebraElement acc = AlgebraElement::zero(rel.group, Ring::Z());
    for (const auto& term : rel.terms) {
        AlgebraElement nh = norm_element(term.subgroup, Ring::Z());
        acc = add(acc, multiply(multiply(term.a, nh), term.b));
    }
    return acc;
}

inline bool verify_norm_relation(const NormRelation& rel) {
    if (rel.denominator < 1) return false;
    for (const auto& term : rel.terms)
        if (term.subgroup.is_trivial()) return false;
    AlgebraElement sum = relation_sum(rel);
    AlgebraElement want = scalar_multiply(mpq_class(rel.denominator), AlgebraElement::one(rel.group, Ring::Z()));
    for (long i = 0; i < rel.group->order; ++i)
        if (sum.coeffs[i] != want.coeffs[i]) return false;
    mpz_class content = rel.denominator;
    for (const auto& term : rel.terms) {
        for (const auto& c : term.a.coeffs) content = gcd(content, c.get_num());
        for (const auto& c : term.b.coeffs) content = gcd(content, c.get_num());
    }
    return content == 1;
}

inline bool verify_scalar_relation(const ScalarRelation& rel) {
    if (rel.denominator < 1) return false;
    AlgebraElement acc = AlgebraElement::zero(rel.group, Ring::Z());
    mpz_class content = rel.denominator;
    for (const auto& [h, c] : rel.coefficients) {
        if (h.is_trivial()) return false;
        acc = add(acc, scalar_multiply(mpq_class(c), norm_element(h, Ring::Z())));
        content = gcd(content, c);
    }
    for (long i = 0; i < rel.group->order; ++i) {
        mpq_class want = (i == FiniteGroup::identity) ? mpq_class(rel.denominator) : mpq_class(0);
        if (acc.coeffs[i] != want) return false;
    }
    return content == 1;
}

inline bool verify_brauer_relation(const BrauerRelation& rel) {
    for (int32_t x = 0; x < rel.group->order; ++x) {
        mpq_class acc = 0;
        for (const auto& [h, c] : rel.coefficients) acc += c * induced_trivial_character(h, x);
        if (acc != 0) return false;
    }
    return true;
}

namespace detail {

inline void require_nontrivial(const std::vector<Subgroup>& subgroups) {
    for (const auto& h : subgroups)
        if (h.is_trivial()) throw std::invalid_argument("relation search requires nontrivial subgroups");
}

struct IdealLattice {
    std::vector<IdealGenerator> generators;
    LatticeBuilder builder;
};

inline IdealLattice ideal_lattice(const GroupPtr& g, const std::vector<Subgroup>& subgroups,
                                  bool track) {
    long n = g->order;
    IdealLattice lat{norm_translate_family(g, subgroups),
                     LatticeBuilder(n, column_order_with_last(n, FiniteGroup::identity), track)};
    for (const auto& gen : lat.generators) {
        ZVec v(n, 0);
        for (int32_t e : gen.support()) v[e] = 1;
        lat.builder.insert(std::move(v));
    }
    return lat;
}

}  // namespace detail

// d(H): the positive generator of Z intersected with the two-sided ideal
// generated by the N_H over Z[G]; 0 when no relation exists over Q.
inline mpz_class optimal_denominator(const GroupPtr& g, const std::vector<Subgroup>& subgroups) {
    auto lat = detail::ideal_lattice(g, subgroups, false);
    return lat.builder.last_line_pivot();
}

// A norm relation with denominator exactly d(H), or absent. The witness comes
// out of the lattice combination, grouped into terms a * N_H * h.
inline std::optional<NormRelation> find_norm_relation(const GroupPtr& g,
                                                      const std::vector<Subgroup>& subgroups) {
    detail::require_nontrivial(subgroups);
    auto lat = detail::ideal_lattice(g, subgroups, true);
    mpz_class d = lat.builder.last_line_pivot();
    if (d == 0) return std::nullopt;
    Combo combo = lat.builder.last_line_combo();
    NormRelation rel{g, d, {}};
    // accumulate a-coefficients per (subgroup, right translate):
    // c * (g N_H h) contributes c*g to the term a * N_H * h
    std::map<std::pair<std::vector<int32_t>, int32_t>, AlgebraElement> acc;
    std::map<std::pair<std::vector<int32_t>, int32_t>, Subgroup> subs;
    for (const auto& [idx, c] : combo) {
        const IdealGenerator& gen = lat.generators[idx];
        auto key = std::make_pair(gen.subgroup.elements, gen.right);
        auto it = acc.find(key);
        if (it == acc.end()) {
            it = acc.emplace(key, AlgebraElement::zero(g, Ring::Z())).first;
            subs.emplace(key, gen.subgroup);
        }
        it->second.coeffs[gen.left] += mpq_class(c);
    }
    for (auto& [key, a] : acc) {
        if (a.is_zero()) continue;
        rel.terms.push_back(NormRelationTerm{std::move(a), subs.at(key),
                                             AlgebraElement::of_element(g, key.second, Ring::Z())});
    }
    if (!verify_norm_relation(rel))
        throw verification_failure("norm relation failed its exact re-check");
    return rel;
}

// Minimal-denominator scalar relation over the given subgroups, or absent.
inline std::optional<ScalarRelation> find_scalar_relation(const GroupPtr& g,
                                                          const std::vector<Subgroup>& subgroups) {
    detail::require_nontrivial(subgroups);
    long n = g->order;
    LatticeBuilder builder(n, column_order_with_last(n, FiniteGroup::identity), true);
    for (const auto& h : subgroups) {
        ZVec v(n, 0);
        for (int32_t e : h.elements) v[e] = 1;
        builder.insert(std::move(v));
    }
    mpz_class d = builder.last_line_pivot();
    if (d == 0) return std::nullopt;
    ScalarRelation rel{g, d, {}};
    for (const auto& [idx, c] : builder.last_line_combo())
        if (c != 0) rel.coefficients.emplace_back(subgroups[idx], c);
    if (!verify_scalar_relation(rel))
        throw verification_failure("scalar relation failed its exact re-check");
    return rel;
}

// Is there a norm relation over F_p? Agrees with p not dividing d(H) whenever
// d(H) > 0.
inline bool exists_relation_mod_p(const GroupPtr& g, const std::vector<Subgroup>& subgroups, long p) {
    if (!is_prime(p)) throw std::invalid_argument("exists_relation_mod_p: p must be prime");
    detail::require_nontrivial(subgroups);
    long n = g->order;
    FpBuilder builder(n, p, false);
    for (const auto& gen : norm_translate_family(g, subgroups)) {
        std::vector<long> v(n, 0);
        for (int32_t e : gen.support()) v[e] = (v[e] + 1) % p;
        builder.insert(std::move(v));
    }
    std::vector<long> target(n, 0);
    target[FiniteGroup::identity] = 1;
    return builder.contains(target);
}

struct AdmitsResult {
    bool admits = false;
    std::optional<Subgroup> pq_witness;          // fast path, |G| < 4896
    std::optional<NormRelation> ideal_certificate;  // fallback path
};

// Classification: below order 4896 a norm relation exists iff there is a
// non-cyclic subgroup of order pq; at or above that bound (where SL2 of a
// Fermat prime becomes possible) fall back to the ideal test over the
// nontrivial cyclic subgroups.
inline AdmitsResult admits_norm_relation(const GroupPtr& g) {
    AdmitsResult out;
    if (g->order < 4896) {
        out.pq_witness = find_noncyclic_pq_subgroup(g);
        out.admits = out.pq_witness.has_value();
        return out;
    }
    std::vector<Subgroup> cyclic = all_subgroups(g, std::nullopt, true);
    std::vector<Subgroup> nontrivial;
    for (auto& h : cyclic)
        if (!h.is_trivial()) nontrivial.push_back(h);
    out.ideal_certificate = find_norm_relation(g, nontrivial);
    out.admits = out.ideal_certificate.has_value();
    return out;
}

// Scalar relation d = sum b_H N_H, rewritten as the useful Brauer relation
// 0 = -d Ind_{G/1} + sum b_H |H| Ind_{G/H}.
inline BrauerRelation scalar_to_brauer(const ScalarRelation& rel) {
    BrauerRelation out{rel.group, {}};
    out.coefficients.emplace_back(trivial_subgroup(rel.group), mpq_class(-rel.denominator));
    for (const auto& [h, c] : rel.coefficients)
        out.coefficients.emplace_back(h, mpq_class(c * h.order()));
    if (!verify_brauer_relation(out))
        throw verification_failure("Brauer relation failed its fixed-coset re-check");
    return out;
}

// Useful Brauer relation with conjugation-closed support back to a scalar
// relation, averaging coefficients over conjugates.
inline std::optional<ScalarRelation> brauer_to_scalar(const BrauerRelation& brel) {
    const GroupPtr& g = brel.group;
    std::map<std::vector<int32_t>, mpq_class> coeff;
    for (const auto& [h, c] : brel.coefficients) coeff[h.elements] += c;
    mpq_class a1 = 0;
    auto it = coeff.find(std::vector<int32_t>{FiniteGroup::identity});
    if (it != coeff.end()) a1 = it->second;
    if (a1 == 0) throw std::invalid_argument("brauer_to_scalar: relation is not useful (a_1 = 0)");
    // support must be closed under conjugation
    for (const auto& [elems, c] : coeff) {
        if (c == 0) continue;
        Subgroup h{g, elems};
        for (int32_t x = 0; x < g->order; ++x) {
            Subgroup hx = conjugate_subgroup(h, x);
            if (coeff.find(hx.elements) == coeff.end())
                throw std::invalid_argument("brauer_to_scalar: support not closed under conjugation");
        }
    }
    // b_H = (1/|H|) sum over G of a_{H^g}
    std::map<std::vector<int32_t>, mpq_class> b;
    for (const auto& [elems, c] : coeff) {
        Subgroup h{g, elems};
        mpq_class sum = 0;
        for (int32_t x = 0; x < g->order; ++x) sum += coeff.at(conjugate_subgroup(h, x).elements);
        b[elems] = sum / mpq_class(static_cast<long>(elems.size()));
    }
    // 0 = sum b_H N_H with b_1 != 0; normalize to d = sum over nontrivial
    mpq_class b1 = b.at(std::vector<int32_t>{FiniteGroup::identity});
    mpz_class lcm_den = 1;
    for (const auto& [elems, c] : b) lcm_den = lcm(lcm_den, c.get_den());
    mpq_class scaled1 = b1 * lcm_den;
    mpz_class d_num = -scaled1.get_num();
    mpz_class content = abs(d_num);
    std::vector<std::pair<Subgroup, mpz_class>> coeffs;
    for (const auto& [elems, c] : b) {
        if (elems.size() == 1) continue;
        mpq_class scaled = c * lcm_den;
        mpz_class ci = scaled.get_num();
        if (ci == 0) continue;
        content = gcd(content, ci);
        coeffs.emplace_back(Subgroup{g, elems}, ci);
    }
    if (d_num == 0) return std::nullopt;
    int sign = sgn(d_num) < 0 ? -1 : 1;
    ScalarRelation rel{g, d_num * sign / content, {}};
    for (auto& [h, c] : coeffs) rel.coefficients.emplace_back(h, c * sign / content);
    if (!verify_scalar_relation(rel)) return std::nullopt;
    return rel;
}

inline std::set<long> denominator_support(const mpz_class& d) {
    return prime_support(checked_long(d, "denominator"));
}

enum class RelationKind { scalar, general };

// Smallest n such that a relation of the requested kind exists using only
// subgroups of index <= n; 0 if none exists at any index. The optional
// constraint requires the optimal/minimal denominator to divide it;
// universe_max_index restricts the candidate subgroups up front.
inline long minimal_relation_index(const GroupPtr& g, RelationKind kind,
                                   std::optional<mpz_class> denominator_divides = std::nullopt,
                                   std::optional<long> universe_max_index = std::nullopt) {
    std::vector<Subgroup> subs = all_subgroups(g, universe_max_index);
    std::set<long> indices;
    for (const auto& h : subs)
        if (!h.is_trivial()) indices.insert(h.index());
    for (long n : indices) {
        std::vector<Subgroup> family;
        for (const auto& h : subs)
            if (!h.is_trivial() && h.index() <= n) family.push_back(h);
        mpz_class d;
        if (kind == RelationKind::general) {
            d = optimal_denominator(g, family);
        } else {
            long dim = g->order;
            LatticeBuilder builder(dim, column_order_with_last(dim, FiniteGroup::identity), false);
            for (const auto& h : family) {
                ZVec v(dim, 0);
                for (int32_t e : h.elements) v[e] = 1;
                builder.insert(std::move(v));
            }
            d = builder.last_line_pivot();
        }
        if (d == 0) continue;
        if (denominator_divides && *denominator_divides % d != 0) continue;
        return n;
    }
    return 0;
}

}  // namespace normrel
