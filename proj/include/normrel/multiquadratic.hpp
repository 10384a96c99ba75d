#pragma once

// Real multiquadratic fields Q(sqrt(d_1), ..., sqrt(d_n)) with exact rational
// coordinates on the subset basis sqrt(r_T), fundamental units of the
// quadratic subfields by continued fractions, local quadratic characters at
// split primes, square-root extraction by embedding reconstruction with
// mandatory exact verification, and 2-saturation of unit subgroups.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "normrel/group_algebra.hpp"
#include "normrel/interval.hpp"
#include "normrel/numbertheory.hpp"

namespace normrel {

struct bad_reduction : std::runtime_error {
    explicit bad_reduction(const std::string& what) : std::runtime_error(what) {}
};

struct MQField {
    std::vector<long> generators;       // squarefree d_i > 1
    int n = 0;
    long degree = 1;                    // 2^n
    std::vector<mpz_class> radicands;   // r_T per subset mask, r_0 = 1
    std::vector<mpz_class> sqrt_scale;  // m_T with prod_{i in T} d_i = m_T^2 r_T
    std::vector<mpz_class> mul_scale;   // c_{S,T} = sqrt(r_S r_T / r_{S xor T}), index S * 2^n + T
    double discriminant_log = 0.0;
    std::map<long, std::size_t> mask_of_subfield;  // squarefree D -> subset mask
};

using FieldPtr = std::shared_ptr<const MQField>;

inline FieldPtr make_field(const std::vector<long>& gens) {
    if (gens.empty()) throw std::invalid_argument("multiquadratic field needs at least one radicand");
    if (gens.size() > 8) throw cap_exceeded("field degree cap (n <= 8)");
    auto f = std::make_shared<MQField>();
    f->generators = gens;
    f->n = static_cast<int>(gens.size());
    f->degree = 1L << f->n;
    std::vector<std::map<long, int>> gen_primes;
    for (long d : gens) {
        if (d <= 1) throw std::invalid_argument("radicands must be squarefree integers > 1");
        auto fac = factorize(d);
        for (auto& [p, e] : fac)
            if (e > 1) throw std::invalid_argument(std::to_string(d) + " is not squarefree");
        gen_primes.push_back(fac);
    }
    f->radicands.resize(f->degree);
    f->sqrt_scale.resize(f->degree);
    std::set<mpz_class> distinct;
    for (long mask = 0; mask < f->degree; ++mask) {
        std::map<long, int> combined;
        for (int i = 0; i < f->n; ++i)
            if ((mask >> i) & 1)
                for (auto& [p, e] : gen_primes[i]) combined[p] += e;
        mpz_class r = 1, m = 1;
        for (auto& [p, e] : combined) {
            if (e % 2) r *= p;
            for (int k = 0; k < e / 2; ++k) m *= p;
        }
        f->radicands[mask] = r;
        f->sqrt_scale[mask] = m;
        if (!distinct.insert(r).second)
            throw std::invalid_argument("radicands are multiplicatively dependent modulo squares");
        if (mask != 0) {
            long rl = checked_long(r, "radicand");
            f->mask_of_subfield[rl] = mask;
            long disc = rl % 4 == 1 ? rl : 4 * rl;
            f->discriminant_log += std::log(static_cast<double>(disc));
        }
    }
    f->mul_scale.resize(static_cast<std::size_t>(f->degree) * f->degree);
    for (long s = 0; s < f->degree; ++s)
        for (long t = 0; t < f->degree; ++t) {
            mpz_class prod = f->radicands[s] * f->radicands[t];
            mpz_class c;
            mpz_class quot = prod / f->radicands[s ^ t];
            if (quot * f->radicands[s ^ t] != prod || !is_perfect_square(quot, c))
                throw verification_failure("inconsistent multiplication scale");
            f->mul_scale[static_cast<std::size_t>(s) * f->degree + t] = c;
        }
    return f;
}

struct MQElement {
    FieldPtr field;
    std::vector<mpq_class> coords;  // length 2^n over the sqrt(r_T) basis

    static MQElement zero(const FieldPtr& f) {
        return MQElement{f, std::vector<mpq_class>(f->degree, 0)};
    }
    static MQElement of_q(const FieldPtr& f, const mpq_class& v) {
        MQElement x = zero(f);
        x.coords[0] = v;
        return x;
    }
    bool is_zero() const {
        for (const auto& c : coords)
            if (c != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (std::size_t t = 1; t < coords.size(); ++t)
            if (coords[t] != 0) return false;
        return true;
    }
    bool operator==(const MQElement& o) const {
        return field.get() == o.field.get() && coords == o.coords;
    }
};

inline void require_same_field(const MQElement& x, const MQElement& y) {
    if (x.field.get() != y.field.get())
        throw std::invalid_argument("elements of different multiquadratic fields");
}

inline MQElement add(const MQElement& x, const MQElement& y) {
    require_same_field(x, y);
    MQElement out = x;
    for (long t = 0; t < x.field->degree; ++t) out.coords[t] += y.coords[t];
    return out;
}

inline MQElement neg(const MQElement& x) {
    MQElement out = x;
    for (auto& c : out.coords) c = -c;
    return out;
}

inline MQElement mul(const MQElement& x, const MQElement& y) {
    require_same_field(x, y);
    const MQField& f = *x.field;
    MQElement out = MQElement::zero(x.field);
    for (long s = 0; s < f.degree; ++s) {
        if (x.coords[s] == 0) continue;
        for (long t = 0; t < f.degree; ++t) {
            if (y.coords[t] == 0) continue;
            out.coords[s ^ t] += x.coords[s] * y.coords[t] *
                                 mpq_class(f.mul_scale[static_cast<std::size_t>(s) * f.degree + t]);
        }
    }
    return out;
}

inline MQElement scalar_mul(const mpq_class& c, const MQElement& x) {
    MQElement out = x;
    for (auto& v : out.coords) v *= c;
    return out;
}

// Galois conjugation: flip the sign of sqrt(d_i) for every i in the pattern.
inline MQElement conjugate(const MQElement& x, long sign_pattern) {
    MQElement out = x;
    for (long t = 0; t < x.field->degree; ++t)
        if (__builtin_popcountll(t & sign_pattern) & 1) out.coords[t] = -out.coords[t];
    return out;
}

// Absolute field norm: the product over all 2^n conjugates, a rational.
inline mpq_class field_norm(const MQElement& x) {
    MQElement acc = x;
    for (long mask = 1; mask < x.field->degree; ++mask) acc = mul(acc, conjugate(x, mask));
    if (!acc.is_rational()) throw verification_failure("norm did not land in Q");
    return acc.coords[0];
}

inline MQElement inv(const MQElement& x) {
    if (x.is_zero()) throw std::domain_error("division by zero");
    MQElement p = MQElement::of_q(x.field, 1);
    for (long mask = 1; mask < x.field->degree; ++mask) p = mul(p, conjugate(x, mask));
    MQElement full = mul(x, p);
    if (!full.is_rational() || full.coords[0] == 0)
        throw verification_failure("norm computation failed");
    return scalar_mul(1 / full.coords[0], p);
}

inline MQElement power(const MQElement& x, long k) {
    MQElement base = k < 0 ? inv(x) : x;
    unsigned long e = k < 0 ? -static_cast<unsigned long>(k) : k;
    MQElement out = MQElement::of_q(x.field, 1);
    while (e > 0) {
        if (e & 1) out = mul(out, base);
        base = mul(base, base);
        e >>= 1;
    }
    return out;
}

// x^a for a in Z[C_2^n]: the product of conjugates sigma(x)^{a_sigma}, with
// the group element index read as the conjugation sign pattern.
inline MQElement apply_algebra_element(const MQElement& x, const AlgebraElement& a) {
    if (x.is_zero()) throw std::domain_error("apply_algebra_element on zero");
    if (a.group->order != x.field->degree)
        throw std::invalid_argument("algebra element group does not match the field degree");
    MQElement out = MQElement::of_q(x.field, 1);
    for (int32_t g = 0; g < a.group->order; ++g) {
        if (a.coeffs[g] == 0) continue;
        if (a.coeffs[g].get_den() != 1)
            throw std::invalid_argument("apply_algebra_element needs integer exponents");
        long e = checked_long(a.coeffs[g].get_num(), "exponent");
        out = mul(out, power(conjugate(x, g), e));
    }
    return out;
}

// ---- embeddings -----------------------------------------------------------

// Square roots of the basis radicands at a working precision.
struct EmbeddingContext {
    FieldPtr field;
    mpfr_prec_t prec;
    std::vector<Interval> sqrt_radicands;

    explicit EmbeddingContext(const FieldPtr& f, mpfr_prec_t p) : field(f), prec(p) {
        sqrt_radicands.reserve(f->degree);
        for (long t = 0; t < f->degree; ++t)
            sqrt_radicands.push_back(sqrt(Interval::of_z(f->radicands[t], p)));
    }

    // sigma_e(x) for the embedding flipping sqrt(d_i), i in mask e.
    Interval embed(const MQElement& x, long emb_mask) const {
        Interval acc(prec);
        for (long t = 0; t < field->degree; ++t) {
            if (x.coords[t] == 0) continue;
            Interval term = Interval::of_q(x.coords[t], prec) * sqrt_radicands[t];
            acc = (__builtin_popcountll(t & emb_mask) & 1) ? acc - term : acc + term;
        }
        return acc;
    }
};

// Sign-determined embedding: doubles the precision until the interval
// excludes zero (x must be nonzero).
inline Interval embedding_interval(const MQElement& x, long emb_mask, mpfr_prec_t bits,
                                   mpfr_prec_t cap = 1 << 20) {
    for (mpfr_prec_t p = bits;; p *= 2) {
        EmbeddingContext ctx(x.field, p);
        Interval v = ctx.embed(x, emb_mask);
        if (!v.contains_zero()) return v;
        if (p > cap) throw budget_exhausted("embedding sign undecidable at precision cap");
    }
}

// Logarithmic embedding: log|sigma(x)| over all 2^n real embeddings.
inline std::vector<Interval> log_embedding(const MQElement& x, mpfr_prec_t bits) {
    if (x.is_zero()) throw std::domain_error("log embedding of zero");
    std::vector<Interval> out;
    out.reserve(x.field->degree);
    for (long e = 0; e < x.field->degree; ++e)
        out.push_back(log(abs(embedding_interval(x, e, bits))));
    return out;
}

// ---- fundamental units by continued fractions -----------------------------

// Fundamental unit of the maximal order of Q(sqrt(D)), D > 1 squarefree, by
// the continued fraction of (r + sqrt(Delta))/2 with Delta the field
// discriminant. One trip around the periodic cycle yields the fundamental
// automorphism; the unit is returned with positive coordinates (> 1) and its
// norm is re-verified exactly.
inline MQElement fundamental_unit(long d_value, long max_steps = 4000000) {
    if (d_value <= 1 || !is_squarefree(d_value))
        throw std::invalid_argument("fundamental_unit needs a squarefree integer > 1");
    mpz_class delta = (d_value % 4 == 1) ? mpz_class(d_value) : mpz_class(4) * d_value;
    mpz_class s = isqrt(delta);
    mpz_class p = (delta % 2 == 1) ? 1 : 0;
    mpz_class q = 2;
    std::map<std::pair<mpz_class, mpz_class>, long> seen;
    std::vector<mpz_class> partials;
    long cycle_start = -1;
    for (long step = 0; step < max_steps; ++step) {
        auto key = std::make_pair(p, q);
        auto it = seen.find(key);
        if (it != seen.end()) {
            cycle_start = it->second;
            break;
        }
        seen.emplace(key, step);
        if (q <= 0) throw verification_failure("continued fraction denominator became nonpositive");
        mpz_class a = (p + s) / q;
        partials.push_back(a);
        mpz_class pn = a * q - p;
        q = (delta - pn * pn) / q;
        p = pn;
    }
    if (cycle_start < 0) throw budget_exhausted("continued fraction period exceeds the step budget");
    // recover the surd at the cycle start
    mpz_class cp = (delta % 2 == 1) ? 1 : 0, cq = 2;
    for (long i = 0; i < cycle_start; ++i) {
        mpz_class a = partials[i];
        mpz_class pn = a * cq - cp;
        cq = (delta - pn * pn) / cq;
        cp = pn;
    }
    // cycle matrix product [[a,1],[1,0]] over the period
    mpz_class m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (std::size_t i = cycle_start; i < partials.size(); ++i) {
        const mpz_class& a = partials[i];
        mpz_class n00 = m00 * a + m01, n10 = m10 * a + m11;
        m01 = m00;
        m11 = m10;
        m00 = n00;
        m10 = n10;
    }
    // eta = m10 * (cp + sqrt(delta))/cq + m11
    mpq_class rat = make_q(m10 * cp + m11 * cq, cq);
    mpq_class irr = make_q(m10 * ((d_value % 4 == 1) ? 1 : 2), cq);  // times sqrt(D)
    FieldPtr f = make_field({d_value});
    MQElement u = MQElement::zero(f);
    u.coords[0] = abs(rat);
    u.coords[1] = abs(irr);
    mpq_class norm = u.coords[0] * u.coords[0] - mpq_class(d_value) * u.coords[1] * u.coords[1];
    if (!(norm == 1 || norm == -1)) throw verification_failure("continued fraction unit has norm != +-1");
    if (u.coords[1] == 0) throw verification_failure("continued fraction produced a rational unit");
    return u;
}

// The squarefree integers generating the 2^n - 1 quadratic subfields.
inline std::vector<long> quad_subfields(const FieldPtr& f) {
    std::vector<long> out;
    for (const auto& [d, mask] : f->mask_of_subfield) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

// Transplants an element of Q(sqrt(D)) into a field containing that subfield.
inline MQElement embed_subfield_element(const FieldPtr& f, long d_value, const MQElement& x) {
    auto it = f->mask_of_subfield.find(d_value);
    if (it == f->mask_of_subfield.end())
        throw std::invalid_argument("not a quadratic subfield of this field");
    MQElement out = MQElement::zero(f);
    out.coords[0] = x.coords[0];
    out.coords[it->second] = x.coords[1];
    return out;
}

// ---- local characters ------------------------------------------------------

struct LocalCharacter {
    FieldPtr field;
    long prime = 0;
    std::map<long, long> root_choices;  // d_i -> least square root mod q
    bool tested_unit_only = true;
    std::vector<long> basis_residue;  // residue of sqrt(r_T) mod q per mask
};

// Present iff q is an odd prime, coprime to every d_i, with every d_i a
// quadratic residue (q splits completely). Root choices are the least
// positive square roots.
inline std::optional<LocalCharacter> make_local_character(const FieldPtr& f, long q) {
    if (q < 3 || !is_prime(q)) return std::nullopt;
    for (long d : f->generators)
        if (d % q == 0) return std::nullopt;
    LocalCharacter c{f, q, {}, true, {}};
    for (long d : f->generators) {
        if (legendre_symbol(d, q) != 1) return std::nullopt;
        c.root_choices[d] = sqrt_mod(d, q);
    }
    c.basis_residue.resize(f->degree);
    for (long t = 0; t < f->degree; ++t) {
        long acc = 1;
        for (int i = 0; i < f->n; ++i)
            if ((t >> i) & 1) acc = mulmod(acc, c.root_choices.at(f->generators[i]), q);
        long m = checked_long(f->sqrt_scale[t] % q, "scale residue");
        acc = mulmod(acc, powmod(m, q - 2, q), q);
        c.basis_residue[t] = acc;
    }
    return c;
}

// Quadratic-residue bit of x at the degree-1 prime fixed by the character:
// 0 for a square, 1 otherwise. Throws bad_reduction when x does not reduce.
inline int evaluate_character(const LocalCharacter& c, const MQElement& x) {
    long q = c.prime;
    long acc = 0;
    for (long t = 0; t < x.field->degree; ++t) {
        const mpq_class& v = x.coords[t];
        if (v == 0) continue;
        long den = checked_long(v.get_den() % q, "denominator residue");
        if (den == 0) throw bad_reduction("denominator vanishes at the chosen prime");
        long num = checked_long(v.get_num() % q, "numerator residue");
        long val = mulmod(((num % q) + q) % q, powmod(den, q - 2, q), q);
        acc = (acc + mulmod(val, c.basis_residue[t], q)) % q;
    }
    if (acc == 0) throw bad_reduction("element reduces to zero at the chosen prime");
    return legendre_symbol(acc, q) == 1 ? 0 : 1;
}

// ---- square roots ----------------------------------------------------------

// Best rational approximation of the exact dyadic value with denominator at
// most `bound`, accepted only if it approximates within 2^(-tol_bits).
inline std::optional<mpq_class> reconstruct_rational(const mpq_class& value, const mpz_class& bound,
                                                     long tol_bits) {
    mpq_class x = value;
    mpz_class h0 = 1, h1;  // convergent numerators: h1 current
    mpz_class k0 = 0, k1;
    mpz_class a = x.get_num() / x.get_den();
    if (x.get_num() % x.get_den() != 0 && x < 0) a -= 1;  // floor
    h1 = a;
    k1 = 1;
    mpq_class frac = x - mpq_class(a);
    while (frac != 0) {
        mpq_class inv_frac = 1 / frac;
        mpz_class ai = inv_frac.get_num() / inv_frac.get_den();
        frac = inv_frac - mpq_class(ai);
        mpz_class h2 = ai * h1 + h0;
        mpz_class k2 = ai * k1 + k0;
        if (k2 > bound) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    mpq_class cand = make_q(h1, k1);
    mpq_class err = abs(value - cand);
    mpq_class tol = make_q(1, mpz_class(1) << tol_bits);
    if (err <= tol) return cand;
    return std::nullopt;
}

struct SqrtOutcome {
    std::optional<MQElement> root;   // exact: root^2 == x, verified
    bool certified_absent = false;   // negative embedding or character value 1
    long certifying_prime = 0;       // 0 when the certificate is an embedding sign
};

// Exact square root in the field: floating-point square roots of all real
// embeddings over a doubling precision ladder, sign-pattern search, rational
// reconstruction with denominator bound 2^(prec/4), and mandatory exact
// verification. A missing root is only reported as certified when a local
// character witnesses non-squareness (or an embedding is negative).
inline SqrtOutcome sqrt_in_field_ex(const MQElement& x, long precision_cap = 8192,
                                    long character_budget = 128) {
    if (x.is_zero()) throw std::invalid_argument("sqrt of zero");
    const FieldPtr& f = x.field;
    long deg = f->degree;
    SqrtOutcome out;
    // negative embedding: certified non-square in a totally real field
    for (long e = 0; e < deg; ++e) {
        Interval v = embedding_interval(x, e, 128);
        if (v.strictly_negative()) {
            out.certified_absent = true;
            return out;
        }
    }
    // character scan helper
    long chars_seen = 0;
    long next_prime = 3;
    auto scan_characters = [&](long count) -> bool {
        while (count > 0 && chars_seen < character_budget) {
            long q = next_prime;
            next_prime += 2;
            auto c = make_local_character(f, q);
            if (!c) continue;
            ++chars_seen;
            --count;
            try {
                if (evaluate_character(*c, x) == 1) {
                    out.certified_absent = true;
                    out.certifying_prime = q;
                    return true;
                }
            } catch (const bad_reduction&) {
            }
        }
        return false;
    };
    if (scan_characters(20)) return out;
    if (deg >= 32) throw budget_exhausted("square root sign search infeasible at this degree");
    long patterns = 1L << (deg - 1);
    for (long prec = 128; prec <= precision_cap; prec *= 2) {
        EmbeddingContext ctx(f, prec);
        std::vector<Interval> roots;
        roots.reserve(deg);
        bool widened = false;
        for (long e = 0; e < deg; ++e) {
            Interval v = ctx.embed(x, e);
            if (v.contains_zero() || !v.strictly_positive()) {
                widened = true;
                break;
            }
            roots.push_back(sqrt(v));
        }
        if (widened) continue;
        mpz_class bound = mpz_class(1) << (prec / 4);
        long tol_bits = 3 * prec / 4;
        Interval inv_deg = Interval::of_q(make_q(1, deg), prec);
        for (long pat = 0; pat < patterns; ++pat) {
            // signs: embedding 0 positive, embedding e sign from bit e-1
            auto sign_of = [&](long e) { return e == 0 ? 1 : (((pat >> (e - 1)) & 1) ? -1 : 1); };
            // coordinate 0 first: cheap rejection of wrong sign patterns
            Interval coord0(prec);
            for (long e = 0; e < deg; ++e)
                coord0 = sign_of(e) > 0 ? coord0 + roots[e] : coord0 - roots[e];
            coord0 = coord0 * inv_deg;
            auto c0 = reconstruct_rational(coord0.mid_q(), bound, tol_bits);
            if (!c0) continue;
            MQElement y = MQElement::zero(f);
            y.coords[0] = *c0;
            bool ok = true;
            for (long t = 1; t < deg && ok; ++t) {
                Interval acc(prec);
                for (long e = 0; e < deg; ++e) {
                    bool neg = (__builtin_popcountll(t & e) & 1) != 0;
                    bool pos = (sign_of(e) > 0) != neg;
                    acc = pos ? acc + roots[e] : acc - roots[e];
                }
                acc = acc * inv_deg / ctx.sqrt_radicands[t];
                auto ct = reconstruct_rational(acc.mid_q(), bound, tol_bits);
                if (!ct) {
                    ok = false;
                    break;
                }
                y.coords[t] = *ct;
            }
            if (!ok) continue;
            if (mul(y, y) == x) {
                out.root = std::move(y);
                return out;
            }
        }
    }
    scan_characters(character_budget);
    return out;
}

// Simple wrapper: a definite answer or budget_exhausted.
inline std::optional<MQElement> sqrt_in_field(const MQElement& x, long precision_cap = 8192) {
    SqrtOutcome out = sqrt_in_field_ex(x, precision_cap);
    if (out.root) return out.root;
    if (out.certified_absent) return std::nullopt;
    throw budget_exhausted("square root undecided within the precision and character budgets");
}

// ---- unit subgroups and saturation ----------------------------------------

struct UnitSubgroup {
    FieldPtr field;
    std::vector<MQElement> generators;  // multiplicatively independent mod +-1
    bool includes_minus_one = true;
    long precision_bits = 128;
};

// Verifies that every generator is a unit: absolute norm exactly +-1.
inline bool all_units(const UnitSubgroup& v) {
    for (const auto& g : v.generators) {
        mpq_class nrm = field_norm(g);
        if (!(nrm == 1 || nrm == -1)) return false;
    }
    return true;
}

inline std::vector<std::vector<Interval>> unit_log_matrix(const UnitSubgroup& v, mpfr_prec_t bits) {
    std::vector<std::vector<Interval>> rows;
    rows.reserve(v.generators.size());
    for (const auto& g : v.generators) rows.push_back(log_embedding(g, bits));
    return rows;
}

// Interval determinant by Gaussian elimination with midpoint pivoting.
// Throws domain_error when a pivot interval contains zero.
inline Interval interval_determinant(std::vector<std::vector<Interval>> m) {
    std::size_t n = m.size();
    mpfr_prec_t prec = n == 0 ? 128 : m[0][0].precision();
    Interval det = Interval::of_long(1, prec);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i][k].mid_double()) > std::abs(m[piv][k].mid_double())) piv = i;
        if (piv != k) {
            std::swap(m[piv], m[k]);
            det = -det;
        }
        det = det * m[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            Interval factor = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] = m[i][j] - factor * m[k][j];
        }
    }
    return det;
}

// Rank certificate for the generators: the regulator submatrix (all columns
// but the first) has interval determinant excluding zero. Retries at doubled
// precision so the verdict is backed by two independent evaluations.
inline bool independent_at_two_precisions(const UnitSubgroup& v) {
    std::size_t r = v.generators.size();
    if (r + 1 != static_cast<std::size_t>(v.field->degree)) return false;
    for (mpfr_prec_t bits = v.precision_bits;; bits *= 2) {
        bool ok = true;
        Interval first(bits);
        for (int round = 0; round < 2; ++round) {
            mpfr_prec_t p = round == 0 ? bits : bits * 2;
            auto logs = unit_log_matrix(v, p);
            std::vector<std::vector<Interval>> sub(r);
            for (std::size_t i = 0; i < r; ++i)
                sub[i] = std::vector<Interval>(logs[i].begin() + 1, logs[i].end());
            try {
                Interval det = interval_determinant(std::move(sub));
                if (det.contains_zero()) {
                    ok = false;
                    break;
                }
                if (round == 1 && !consistent(first, det)) return false;
                first = det;
            } catch (const std::domain_error&) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
        if (bits > 1 << 16) return false;
    }
}

struct SaturationBudget {
    long character_cap = 512;
    long precision_cap = 8192;
};

struct SaturationReport {
    UnitSubgroup group;
    int roots_adjoined = 0;  // 2-exponent of the index [final : initial]
    int passes = 0;
    bool kernel_empty = false;
    bool certified_to_bound = false;
    bool grh_conditional = true;
    long characters_used = 0;
};

namespace detail {

struct CharacterPool {
    FieldPtr field;
    long char_cap;
    double gw_limit;  // only primes below this bound qualify
    std::vector<LocalCharacter> chars;
    long next_candidate = 3;
    bool exhausted_below_bound = false;

    void grow_to(std::size_t want) {
        while (chars.size() < want && static_cast<long>(chars.size()) < char_cap) {
            if (static_cast<double>(next_candidate) > gw_limit) {
                exhausted_below_bound = true;
                return;
            }
            auto c = make_local_character(field, next_candidate);
            next_candidate += 2;
            if (c) chars.push_back(std::move(*c));
        }
    }
};

// Bit rows of character values; lane 0 is -1 when present.
inline std::vector<std::vector<int>> character_matrix(const CharacterPool& pool,
                                                      const UnitSubgroup& v,
                                                      std::vector<std::size_t>& usable) {
    std::size_t lanes = (v.includes_minus_one ? 1 : 0) + v.generators.size();
    std::vector<std::vector<int>> m(lanes);
    usable.clear();
    for (std::size_t c = 0; c < pool.chars.size(); ++c) {
        std::vector<int> col(lanes, 0);
        bool good = true;
        std::size_t lane = 0;
        if (v.includes_minus_one) {
            col[lane++] = legendre_symbol(pool.chars[c].prime - 1, pool.chars[c].prime) == 1 ? 0 : 1;
        }
        for (const auto& g : v.generators) {
            try {
                col[lane++] = evaluate_character(pool.chars[c], g);
            } catch (const bad_reduction&) {
                good = false;
                break;
            }
        }
        if (!good) continue;
        usable.push_back(c);
        for (std::size_t l = 0; l < lanes; ++l) m[l].push_back(col[l]);
    }
    return m;
}

// Left kernel of a 0/1 matrix over F_2 (rows = lanes, cols = characters).
inline std::vector<std::vector<int>> f2_left_kernel(const std::vector<std::vector<int>>& m) {
    std::size_t rows = m.size();
    std::size_t cols = rows == 0 ? 0 : m[0].size();
    // augmented [m | I], eliminate over the value columns
    std::vector<std::vector<int>> work(rows, std::vector<int>(cols + rows, 0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) work[i][j] = m[i][j];
        work[i][cols + i] = 1;
    }
    std::size_t rank = 0;
    for (std::size_t j = 0; j < cols && rank < rows; ++j) {
        std::size_t piv = rank;
        while (piv < rows && work[piv][j] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(work[piv], work[rank]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != rank && work[i][j] == 1)
                for (std::size_t t = 0; t < cols + rows; ++t) work[i][t] ^= work[rank][t];
        ++rank;
    }
    std::vector<std::vector<int>> kernel;
    for (std::size_t i = rank; i < rows; ++i)
        kernel.emplace_back(work[i].begin() + cols, work[i].end());
    return kernel;
}

}  // namespace detail

// Iterative 2-saturation of a unit subgroup per the kernel-of-characters
// scheme: compute the F_2 kernel of character values over the current prime
// set T, extract exact square roots of kernel candidates, restart on success,
// and grow T (doubling) towards the Grunwald-Wang bound once the kernel is
// empty. GRH-conditional by construction; a character certificate of
// non-squareness is unconditional.
inline SaturationReport two_saturate(const UnitSubgroup& v, const SaturationBudget& budget = {}) {
    SaturationReport report{v};
    if (!all_units(v)) throw std::invalid_argument("two_saturate requires unit generators");
    const FieldPtr& f = v.field;
    long deg = f->degree;
    double c0 = 18.0 * 4 * std::pow(2 * f->discriminant_log + 6 * deg * std::log(2.0), 2);
    detail::CharacterPool pool{f, budget.character_cap, c0, {}, 3, false};
    std::size_t lanes = (v.includes_minus_one ? 1 : 0) + report.group.generators.size();
    pool.grow_to(10 + lanes);
    int max_passes = 3 * f->n;
    for (;;) {
        std::vector<std::size_t> usable;
        auto matrix = detail::character_matrix(pool, report.group, usable);
        auto kernel = detail::f2_left_kernel(matrix);
        report.characters_used = static_cast<long>(usable.size());
        bool adjoined_this_round = false;
        std::vector<bool> replaced(report.group.generators.size(), false);
        for (const auto& kvec : kernel) {
            // candidate = product of the selected lanes; skip pure torsion
            std::size_t off = v.includes_minus_one ? 1 : 0;
            std::vector<std::size_t> sel;
            for (std::size_t i = off; i < kvec.size(); ++i)
                if (kvec[i]) sel.push_back(i - off);
            if (sel.empty()) continue;
            bool stale = false;
            for (std::size_t i : sel)
                if (replaced[i]) stale = true;
            if (stale) continue;
            MQElement alpha = MQElement::of_q(f, v.includes_minus_one && kvec[0] ? -1 : 1);
            for (std::size_t i : sel) alpha = mul(alpha, report.group.generators[i]);
            SqrtOutcome sq = sqrt_in_field_ex(alpha, budget.precision_cap);
            if (!sq.root) continue;
            // exact soundness check: the adjoined root squares to alpha
            if (!(mul(*sq.root, *sq.root) == alpha))
                throw verification_failure("adjoined root fails its exact square check");
            report.group.generators[sel.front()] = *sq.root;
            replaced[sel.front()] = true;
            ++report.roots_adjoined;
            adjoined_this_round = true;
        }
        if (adjoined_this_round) {
            ++report.passes;
            if (report.passes > max_passes)
                throw verification_failure("saturation pass count exceeded the 3n sanity bound");
            continue;
        }
        report.kernel_empty = kernel.empty();
        // grow towards the bound; stop at the character budget
        if (pool.exhausted_below_bound) break;
        if (static_cast<long>(pool.chars.size()) >= budget.character_cap) break;
        std::size_t before = pool.chars.size();
        pool.grow_to(std::max<std::size_t>(before * 2, 10 + lanes));
        if (pool.chars.size() == before) break;
    }
    report.certified_to_bound = report.kernel_empty && pool.exhausted_below_bound;
    report.grh_conditional = true;
    return report;
}

// ---- size reduction and regulators -----------------------------------------

// Pairwise size reduction in the logarithmic embedding: subtract the nearest
// integer multiple whenever it shrinks the log 2-norm. The group is
// unchanged; the basis gets shorter.
inline UnitSubgroup size_reduce(const UnitSubgroup& v) {
    UnitSubgroup out = v;
    std::size_t r = out.generators.size();
    if (r < 2) return out;
    auto logs_of = [&](const MQElement& g) {
        std::vector<double> l;
        for (const auto& iv : log_embedding(g, out.precision_bits)) l.push_back(iv.mid_double());
        return l;
    };
    std::vector<std::vector<double>> logs;
    for (const auto& g : out.generators) logs.push_back(logs_of(g));
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool changed = false;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                if (i == j) continue;
                double denom = dot(logs[j], logs[j]);
                if (denom <= 0) continue;
                long k = std::lround(dot(logs[i], logs[j]) / denom);
                if (k == 0) continue;
                std::vector<double> cand(logs[i].size());
                for (std::size_t t = 0; t < cand.size(); ++t) cand[t] = logs[i][t] - k * logs[j][t];
                if (dot(cand, cand) >= dot(logs[i], logs[i]) - 1e-12) continue;
                out.generators[i] = mul(out.generators[i], power(out.generators[j], -k));
                logs[i] = logs_of(out.generators[i]);
                changed = true;
            }
        if (!changed) break;
    }
    return out;
}

// Regulator of the unit basis: |det| of the log-embedding matrix with the
// first column removed, as an interval stable under precision doubling.
inline Interval regulator_interval(const UnitSubgroup& v, mpfr_prec_t bits) {
    std::size_t r = v.generators.size();
    for (mpfr_prec_t p = bits;; p *= 2) {
        auto logs1 = unit_log_matrix(v, p);
        auto logs2 = unit_log_matrix(v, p * 2);
        auto submatrix = [&](std::vector<std::vector<Interval>>& logs) {
            std::vector<std::vector<Interval>> sub(r);
            for (std::size_t i = 0; i < r; ++i)
                sub[i] = std::vector<Interval>(logs[i].begin() + 1, logs[i].end());
            return sub;
        };
        try {
            Interval d1 = abs(interval_determinant(submatrix(logs1)));
            Interval d2 = abs(interval_determinant(submatrix(logs2)));
            if (consistent(d1, d2) && d2.width_double() < 1e-9) return d2;
        } catch (const std::domain_error&) {
        }
        if (p > 1 << 16) throw budget_exhausted("regulator did not stabilize at the precision cap");
    }
}

// Membership of x in the unit subgroup modulo sign: exponents e with
// x = +- prod g_i^{e_i}, found from the logarithmic embedding and verified
// exactly.
inline std::optional<std::pair<std::vector<long>, int>> unit_membership(const UnitSubgroup& v,
                                                                        const MQElement& x) {
    std::size_t r = v.generators.size();
    for (mpfr_prec_t bits = std::max<mpfr_prec_t>(v.precision_bits, 192); bits <= (1 << 14);
         bits *= 2) {
        auto logs = unit_log_matrix(v, bits);
        auto xl = log_embedding(x, bits);
        // solve the square system on columns 1..r in doubles
        std::vector<std::vector<double>> a(r, std::vector<double>(r));
        std::vector<double> b(r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) a[j][i] = logs[i][j + 1].mid_double();
        for (std::size_t j = 0; j < r; ++j) b[j] = xl[j + 1].mid_double();
        // Gaussian elimination
        bool singular = false;
        for (std::size_t k = 0; k < r && !singular; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < r; ++i)
                if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
            if (std::abs(a[piv][k]) < 1e-12) {
                singular = true;
                break;
            }
            std::swap(a[piv], a[k]);
            std::swap(b[piv], b[k]);
            for (std::size_t i = k + 1; i < r; ++i) {
                double f = a[i][k] / a[k][k];
                for (std::size_t j = k; j < r; ++j) a[i][j] -= f * a[k][j];
                b[i] -= f * b[k];
            }
        }
        if (singular) continue;
        std::vector<double> e(r);
        for (std::size_t i = r; i-- > 0;) {
            double s = b[i];
            for (std::size_t j = i + 1; j < r; ++j) s -= a[i][j] * e[j];
            e[i] = s / a[i][i];
        }
        std::vector<long> exps(r);
        bool near_integer = true;
        for (std::size_t i = 0; i < r; ++i) {
            exps[i] = std::lround(e[i]);
            if (std::abs(e[i] - exps[i]) > 0.25) near_integer = false;
        }
        if (!near_integer) continue;
        MQElement prod = MQElement::of_q(v.field, 1);
        for (std::size_t i = 0; i < r; ++i) prod = mul(prod, power(v.generators[i], exps[i]));
        if (prod == x) return std::make_pair(exps, 1);
        if (neg(prod) == x) return std::make_pair(exps, -1);
    }
    return std::nullopt;
}

struct UnitGroupReport {
    UnitSubgroup group;
    Interval regulator;
    int initial_index_exponent = 0;
    bool certified_to_bound = false;
    bool grh_conditional = true;
    int saturation_passes = 0;
    long characters_used = 0;
};

// Unit group of a real multiquadratic field: fundamental units of all
// quadratic subfields, 2-saturation of the group they generate, then size
// reduction and a regulator interval stable under precision doubling.
inline UnitGroupReport unit_group(const FieldPtr& f, const SaturationBudget& budget = {}) {
    UnitSubgroup v{f, {}, true, 128};
    for (long d : quad_subfields(f))
        v.generators.push_back(embed_subfield_element(f, d, fundamental_unit(d)));
    if (!all_units(v)) throw verification_failure("subfield unit failed its norm check");
    if (!independent_at_two_precisions(v))
        throw verification_failure("subfield units are not independent");
    UnitGroupReport report{v, Interval(128)};
    if (f->n == 1) {
        // the continued fraction already gives the full unit group
        report.regulator = regulator_interval(v, 128);
        report.grh_conditional = false;
        return report;
    }
    SaturationReport sat = two_saturate(v, budget);
    report.group = size_reduce(sat.group);
    if (!all_units(report.group)) throw verification_failure("saturated generator failed its norm check");
    if (!independent_at_two_precisions(report.group))
        throw verification_failure("saturated basis lost independence");
    report.initial_index_exponent = sat.roots_adjoined;
    report.certified_to_bound = sat.certified_to_bound;
    report.grh_conditional = sat.grh_conditional;
    report.saturation_passes = sat.passes;
    report.characters_used = sat.characters_used;
    report.regulator = regulator_interval(report.group, 128);
    return report;
}

// Effective Grunwald-Wang bound c0 = 18 d^2 (2 log|Delta| + 6 n log d + log M_S)^2.
inline double grunwald_wang_bound(long d, long n, double log_disc, double log_ms) {
    auto fac = factorize(d);
    if (d < 2 || fac.size() != 1) throw std::invalid_argument("d must be a prime power >= 2");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    double inner = 2 * log_disc + 6 * static_cast<double>(n) * std::log(static_cast<double>(d)) + log_ms;
    return 18.0 * static_cast<double>(d) * static_cast<double>(d) * inner * inner;
}

}  // namespace normrel
