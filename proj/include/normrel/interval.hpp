#pragma once

// Directed-rounding interval arithmetic on MPFR reals. Just enough for the
// multiquadratic unit machinery: embeddings, logs, norms, and small interval
// determinants for regulators. Endpoints carry the working precision; binary
// operations widen to the larger precision of their operands.

#include <algorithm>
#include <string>

#include <mpfr.h>

#include "normrel/common.hpp"

namespace normrel {

class Interval {
public:
    Interval() : Interval(128) {}
    explicit Interval(mpfr_prec_t prec) : prec_(prec) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    Interval(const Interval& o) : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    Interval(Interval&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(lo_, 2);
        mpfr_init2(hi_, 2);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    Interval& operator=(Interval o) noexcept {
        std::swap(prec_, o.prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Interval of_long(long v, mpfr_prec_t prec) {
        Interval x(prec);
        mpfr_set_si(x.lo_, v, MPFR_RNDD);
        mpfr_set_si(x.hi_, v, MPFR_RNDU);
        return x;
    }
    static Interval of_q(const mpq_class& v, mpfr_prec_t prec) {
        Interval x(prec);
        mpfr_set_q(x.lo_, v.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(x.hi_, v.get_mpq_t(), MPFR_RNDU);
        return x;
    }
    static Interval of_z(const mpz_class& v, mpfr_prec_t prec) {
        Interval x(prec);
        mpfr_set_z(x.lo_, v.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(x.hi_, v.get_mpz_t(), MPFR_RNDU);
        return x;
    }

    mpfr_prec_t precision() const { return prec_; }
    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }
    double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid_double() const { return (lo_double() + hi_double()) / 2; }

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool strictly_positive() const { return mpfr_sgn(lo_) > 0; }
    bool strictly_negative() const { return mpfr_sgn(hi_) < 0; }
    bool contains_q(const mpq_class& v) const {
        return mpfr_cmp_q(lo_, v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, v.get_mpq_t()) >= 0;
    }

    // Exact dyadic midpoint as a rational.
    mpq_class mid_q() const {
        mpfr_t mid;
        mpfr_init2(mid, prec_ + 1);
        mpfr_add(mid, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
        mpq_class out = dyadic_of(mid);
        mpfr_clear(mid);
        return out;
    }

    double width_double() const {
        mpfr_t w;
        mpfr_init2(w, prec_);
        mpfr_sub(w, hi_, lo_, MPFR_RNDU);
        double d = mpfr_get_d(w, MPFR_RNDU);
        mpfr_clear(w);
        return d;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec_, b.prec_));
        mpfr_add(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return out;
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec_, b.prec_));
        mpfr_sub(out.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_sub(out.hi_, a.hi_, b.lo_, MPFR_RNDU);
        return out;
    }
    friend Interval operator-(const Interval& a) {
        Interval out(a.prec_);
        mpfr_neg(out.lo_, a.hi_, MPFR_RNDD);
        mpfr_neg(out.hi_, a.lo_, MPFR_RNDU);
        return out;
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec_, b.prec_));
        mpfr_t t;
        mpfr_init2(t, out.prec_);
        bool first = true;
        const mpfr_t* as[2] = {&a.lo_, &a.hi_};
        const mpfr_t* bs[2] = {&b.lo_, &b.hi_};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                mpfr_mul(t, *as[i], *bs[j], MPFR_RNDD);
                if (first || mpfr_cmp(t, out.lo_) < 0) mpfr_set(out.lo_, t, MPFR_RNDD);
                mpfr_mul(t, *as[i], *bs[j], MPFR_RNDU);
                if (first || mpfr_cmp(t, out.hi_) > 0) mpfr_set(out.hi_, t, MPFR_RNDU);
                first = false;
            }
        mpfr_clear(t);
        return out;
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) throw std::domain_error("interval division by an interval containing zero");
        Interval out(std::max(a.prec_, b.prec_));
        mpfr_t t;
        mpfr_init2(t, out.prec_);
        bool first = true;
        const mpfr_t* as[2] = {&a.lo_, &a.hi_};
        const mpfr_t* bs[2] = {&b.lo_, &b.hi_};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                mpfr_div(t, *as[i], *bs[j], MPFR_RNDD);
                if (first || mpfr_cmp(t, out.lo_) < 0) mpfr_set(out.lo_, t, MPFR_RNDD);
                mpfr_div(t, *as[i], *bs[j], MPFR_RNDU);
                if (first || mpfr_cmp(t, out.hi_) > 0) mpfr_set(out.hi_, t, MPFR_RNDU);
                first = false;
            }
        mpfr_clear(t);
        return out;
    }

    friend Interval sqrt(const Interval& a) {
        if (mpfr_sgn(a.lo_) < 0) throw std::domain_error("interval sqrt of a negative interval");
        Interval out(a.prec_);
        mpfr_sqrt(out.lo_, a.lo_, MPFR_RNDD);
        mpfr_sqrt(out.hi_, a.hi_, MPFR_RNDU);
        return out;
    }
    friend Interval log(const Interval& a) {
        if (mpfr_sgn(a.lo_) <= 0) throw std::domain_error("interval log requires a positive interval");
        Interval out(a.prec_);
        mpfr_log(out.lo_, a.lo_, MPFR_RNDD);
        mpfr_log(out.hi_, a.hi_, MPFR_RNDU);
        return out;
    }
    friend Interval abs(const Interval& a) {
        if (a.strictly_positive()) return a;
        if (a.strictly_negative()) return -a;
        Interval out(a.prec_);
        mpfr_set_zero(out.lo_, 1);
        mpfr_abs(out.hi_, a.lo_, MPFR_RNDU);
        mpfr_t t;
        mpfr_init2(t, a.prec_);
        mpfr_abs(t, a.hi_, MPFR_RNDU);
        if (mpfr_cmp(t, out.hi_) > 0) mpfr_set(out.hi_, t, MPFR_RNDU);
        mpfr_clear(t);
        return out;
    }

    // True when the two intervals overlap (consistent estimates of one value).
    friend bool consistent(const Interval& a, const Interval& b) {
        return !(mpfr_cmp(a.hi_, b.lo_) < 0 || mpfr_cmp(b.hi_, a.lo_) < 0);
    }

    static mpq_class dyadic_of(const mpfr_t& v) {
        if (mpfr_zero_p(v)) return 0;
        mpz_class m;
        mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v);
        mpq_class q(m);
        if (e >= 0) {
            mpz_class shift;
            mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(e));
            q *= shift;
        } else {
            mpz_class shift;
            mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(-e));
            q /= shift;
        }
        return q;
    }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

}  // namespace normrel
