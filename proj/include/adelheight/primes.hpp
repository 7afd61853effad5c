#pragma once

// Integer factorization: trial division below 10^6, Brent-cycle Pollard rho
// above, deterministic Miller-Rabin below 3.3e24 (12 fixed witnesses).

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

#include "adelheight/errors.hpp"

namespace adelheight {

using PrimeFactorization = std::map<mpz_class, unsigned long>;

namespace detail {

inline const std::vector<unsigned long>& small_primes() {
    static const std::vector<unsigned long> table = [] {
        const unsigned long limit = 1000000;
        std::vector<bool> composite(limit + 1, false);
        std::vector<unsigned long> primes;
        for (unsigned long i = 2; i <= limit; ++i) {
            if (composite[i]) continue;
            primes.push_back(i);
            for (unsigned long j = i * i; j <= limit; j += i) composite[j] = true;
        }
        return primes;
    }();
    return table;
}

inline bool miller_rabin_witness(const mpz_class& n, const mpz_class& a) {
    // returns true if a proves n composite
    if (n % a == 0) return n != a;
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return false;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return false;
    }
    return true;
}

} // namespace detail

inline bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    static const long witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    // the 12 witnesses are a deterministic test below 3.317e24
    static const mpz_class det_bound("3317044064679887385961981");
    for (long w : witnesses) {
        if (n == w) return true;
        if (detail::miller_rabin_witness(n, mpz_class(w))) return false;
    }
    if (n < det_bound) return true;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

namespace detail {

inline mpz_class brent_rho(const mpz_class& n) {
    // n odd composite, not divisible by small primes
    for (unsigned long c = 1;; ++c) {
        mpz_class y = 2, g = 1, q = 1, x, ys;
        const unsigned long m = 128;
        unsigned long r = 1;
        while (g == 1) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
            for (unsigned long k = 0; k < r && g == 1; k += m) {
                ys = y;
                unsigned long count = std::min(m, r - k);
                for (unsigned long i = 0; i < count; ++i) {
                    y = (y * y + c) % n;
                    mpz_class diff = x - y;
                    q = q * (diff < 0 ? -diff : diff) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            r *= 2;
        }
        if (g == n) {
            // backtrack one step at a time
            g = 1;
            while (g == 1) {
                ys = (ys * ys + c) % n;
                mpz_class diff = x - ys;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g != n) return g;
    }
}

inline void factor_into(mpz_class n, PrimeFactorization& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    mpz_class f = brent_rho(n);
    factor_into(f, out);
    factor_into(n / f, out);
}

} // namespace detail

inline PrimeFactorization factor_integer(const mpz_class& n) {
    if (n == 0) throw InputError("factor_integer: zero has no factorization");
    mpz_class m = abs(n);
    PrimeFactorization out;
    for (unsigned long p : detail::small_primes()) {
        if (m == 1) return out;
        if (mpz_cmp_ui(m.get_mpz_t(), p * p) < 0) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            ++out[mpz_class(p)];
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    if (m > 1) detail::factor_into(m, out);
    return out;
}

inline mpz_class recompose(const PrimeFactorization& f) {
    mpz_class n = 1;
    for (const auto& [p, e] : f) {
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
        n *= pe;
    }
    return n;
}

// exponent of p in n (n != 0)
inline unsigned long p_valuation(const mpz_class& n, const mpz_class& p) {
    mpz_class q;
    return mpz_remove(q.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

} // namespace adelheight
