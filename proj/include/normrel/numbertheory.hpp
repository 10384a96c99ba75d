#pragma once

// Elementary number theory helpers: factorization by trial division (all
// inputs here are desk scale), Moebius/totient, Legendre symbols and square
// roots modulo an odd prime.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "normrel/common.hpp"

namespace normrel {

inline std::map<long, int> factorize(long n) {
    std::map<long, int> out;
    if (n < 0) n = -n;
    for (long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    }
    if (n > 1) ++out[n];
    return out;
}

inline std::set<long> prime_support(long n) {
    std::set<long> out;
    for (auto& [p, e] : factorize(n)) out.insert(p);
    return out;
}

inline bool is_prime(long n) {
    if (n < 2) return false;
    auto f = factorize(n);
    return f.size() == 1 && f.begin()->second == 1;
}

inline int moebius(long n) {
    int mu = 1;
    for (auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        mu = -mu;
    }
    return n >= 1 ? mu : 0;
}

inline long euler_phi(long n) {
    long phi = n;
    for (auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
}

inline long radical(long n) {
    long r = 1;
    for (auto& [p, e] : factorize(n)) r *= p;
    return r;
}

inline bool is_squarefree(long n) {
    if (n < 1) return false;
    for (auto& [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

// n = s * m^2 with s squarefree; returns {s, m}.
inline std::pair<long, long> squarefree_decomposition(long n) {
    long s = 1, m = 1;
    for (auto& [p, e] : factorize(n)) {
        for (int i = 0; i + 1 < e; i += 2) m *= p;
        if (e % 2) s *= p;
    }
    return {s, m};
}

inline long mulmod(long a, long b, long m) {
    return static_cast<long>(static_cast<__int128>(a) * b % m);
}

inline long powmod(long base, long exp, long m) {
    base %= m;
    if (base < 0) base += m;
    long r = 1 % m;
    while (exp > 0) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Legendre symbol (a/q) for odd prime q: 1, -1, or 0.
inline int legendre_symbol(long a, long q) {
    a %= q;
    if (a < 0) a += q;
    if (a == 0) return 0;
    long e = powmod(a, (q - 1) / 2, q);
    return e == 1 ? 1 : -1;
}

// Tonelli-Shanks. Requires q odd prime and (a/q) = 1. Returns the smaller of
// the two roots.
inline long sqrt_mod(long a, long q) {
    a %= q;
    if (a < 0) a += q;
    if (a == 0) return 0;
    long s = q - 1;
    int e = 0;
    while (s % 2 == 0) {
        s /= 2;
        ++e;
    }
    long n = 2;
    while (legendre_symbol(n, q) != -1) ++n;
    long x = powmod(a, (s + 1) / 2, q);
    long b = powmod(a, s, q);
    long g = powmod(n, s, q);
    int r = e;
    for (;;) {
        long t = b;
        int m = 0;
        while (t != 1 && m < r) {
            t = mulmod(t, t, q);
            ++m;
        }
        if (m == 0) break;
        long gs = powmod(g, 1L << (r - m - 1), q);
        g = mulmod(gs, gs, q);
        x = mulmod(x, gs, q);
        b = mulmod(b, g, q);
        r = m;
    }
    return std::min(x, q - x);
}

// Extended gcd with the usual smallest-coefficient normalization:
// g = u*a + v*b, g >= 0, |u| <= |b/(2g)|, |v| <= |a/(2g)| (up to edge cases).
inline mpz_class ext_gcd(const mpz_class& a, const mpz_class& b, mpz_class& u, mpz_class& v) {
    mpz_class g;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline mpz_class isqrt(const mpz_class& n) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const mpz_class& n, mpz_class& root) {
    if (n < 0) return false;
    root = isqrt(n);
    return root * root == n;
}

}  // namespace normrel
