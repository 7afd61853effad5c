#pragma once

// Exact arithmetic in a real or imaginary quadratic field Q(sqrt(D)), just
// enough to iterate a rational map on quadratic points and decide equality.
// D is kept squarefree so representations are unique.

#include <gmpxx.h>

#include <utility>

#include "adelheight/errors.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

// write n = s^2 * d0 with d0 squarefree (sign carried by d0)
inline std::pair<mpz_class, mpz_class> squarefree_split(const mpz_class& n) {
    if (n == 0) return {0, 1};
    mpz_class d0 = n < 0 ? mpz_class(-1) : mpz_class(1);
    mpz_class s = 1;
    for (const auto& [p, e] : factor_integer(abs(n))) {
        mpz_class ph;
        mpz_pow_ui(ph.get_mpz_t(), p.get_mpz_t(), e / 2);
        s *= ph;
        if (e % 2) d0 *= p;
    }
    return {d0, s};
}

// u + v*sqrt(D) with D squarefree and not 0 or 1
struct QuadNum {
    mpq_class u, v;
    mpz_class D;

    QuadNum(mpq_class u_, mpq_class v_, mpz_class D_)
        : u(std::move(u_)), v(std::move(v_)), D(std::move(D_)) {
        if (D == 0 || D == 1 || mpz_perfect_square_p(D.get_mpz_t()))
            throw InputError("QuadNum: discriminant must be a nonsquare");
    }

    bool is_rational() const { return v == 0; }
    QuadNum conjugate() const { return QuadNum(u, -v, D); }
    mpq_class norm() const { return u * u - mpq_class(D) * v * v; } // never 0 unless u=v=0
    mpq_class trace() const { return 2 * u; }

    friend bool operator==(const QuadNum& a, const QuadNum& b) {
        return a.D == b.D && a.u == b.u && a.v == b.v;
    }
    friend QuadNum operator+(const QuadNum& a, const QuadNum& b) {
        return QuadNum(a.u + b.u, a.v + b.v, a.D);
    }
    friend QuadNum operator-(const QuadNum& a, const QuadNum& b) {
        return QuadNum(a.u - b.u, a.v - b.v, a.D);
    }
    friend QuadNum operator*(const QuadNum& a, const QuadNum& b) {
        if (a.D != b.D) throw InputError("QuadNum: mixed fields");
        return QuadNum(a.u * b.u + mpq_class(a.D) * a.v * b.v, a.u * b.v + a.v * b.u, a.D);
    }
    friend QuadNum operator*(const mpq_class& c, const QuadNum& a) {
        return QuadNum(c * a.u, c * a.v, a.D);
    }
    QuadNum inverse() const {
        mpq_class n = norm();
        if (n == 0) throw InputError("QuadNum: inverse of zero");
        return QuadNum(u / n, -v / n, D);
    }
    friend QuadNum operator/(const QuadNum& a, const QuadNum& b) { return a * b.inverse(); }
};

} // namespace adelheight
