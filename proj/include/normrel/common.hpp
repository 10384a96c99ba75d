#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace normrel {

// Thrown when a constructed group would exceed the configured order cap.
struct cap_exceeded : std::runtime_error {
    explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iteration budget (characters, precision, passes) runs out.
struct budget_exhausted : std::runtime_error {
    explicit budget_exhausted(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an exact re-check of a computed object fails. This indicates a
// bug, never bad input.
struct verification_failure : std::logic_error {
    explicit verification_failure(const std::string& what) : std::logic_error(what) {}
};

inline long default_order_cap() {
    if (const char* env = std::getenv("NORMREL_ORDER_CAP")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return v;
    }
    return 10000;
}

using Rng = std::mt19937_64;

inline long checked_long(const mpz_class& z, const char* what) {
    if (!z.fits_slong_p()) throw std::overflow_error(std::string(what) + ": value too large");
    return z.get_si();
}

// mpq_class(num, den) does not canonicalize; this does.
inline mpq_class make_q(const mpz_class& num, const mpz_class& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace normrel
