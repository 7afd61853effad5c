#pragma once

// Binary forms of declared degree over Z: c[j] multiplies X^j Y^(d-j).
// Resultants and determinants use a division-free subset expansion (valid over
// Z and over Z/p^M alike, which Bareiss-style exact division is not), sized
// for the small matrices that occur here (<= ~12 rows).

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"

namespace adelheight {

struct BinForm {
    long d = 0;                // declared degree
    std::vector<mpz_class> c;  // size d+1, c[j] ~ X^j Y^(d-j)

    BinForm() : c(1) {}
    BinForm(long degree, std::vector<mpz_class> coeffs) : d(degree), c(std::move(coeffs)) {
        if (static_cast<long>(c.size()) != d + 1) throw InputError("BinForm: coefficient count");
    }
    static BinForm homogenize(const IntPoly& p, long degree) {
        if (p.deg() > degree) throw InputError("BinForm: degree too small to homogenize");
        std::vector<mpz_class> v(degree + 1);
        for (long j = 0; j <= p.deg(); ++j) v[j] = p.c[j];
        return BinForm(degree, std::move(v));
    }

    bool is_zero() const {
        for (const auto& a : c)
            if (a != 0) return false;
        return true;
    }
    // p(x) = form(x, 1); the form equals Y^(d - deg p) * homogenized p
    IntPoly dehomogenize() const { return IntPoly(c); }
    long infinity_multiplicity() const {
        long k = 0;
        for (long j = d; j >= 0 && c[j] == 0; --j) ++k;
        return k; // d+1 for the zero form
    }

    mpz_class content() const { return IntPoly(c).content(); }
    BinForm primitive_part() const {
        mpz_class g = content();
        if (g == 0) throw InputError("BinForm: zero form has no primitive part");
        std::vector<mpz_class> v(c.size());
        for (size_t i = 0; i < c.size(); ++i) mpz_divexact(v[i].get_mpz_t(), c[i].get_mpz_t(), g.get_mpz_t());
        return BinForm(d, std::move(v));
    }
    friend BinForm operator-(const BinForm& f) {
        std::vector<mpz_class> v(f.c.size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = -f.c[i];
        return BinForm(f.d, std::move(v));
    }
    friend bool operator==(const BinForm& a, const BinForm& b) { return a.d == b.d && a.c == b.c; }

    friend BinForm operator*(const BinForm& a, const BinForm& b) {
        std::vector<mpz_class> v(a.d + b.d + 1);
        for (long i = 0; i <= a.d; ++i)
            for (long j = 0; j <= b.d; ++j) v[i + j] += a.c[i] * b.c[j];
        return BinForm(a.d + b.d, std::move(v));
    }
    friend BinForm operator-(const BinForm& a, const BinForm& b) {
        if (a.d != b.d) throw InputError("BinForm: degree mismatch");
        std::vector<mpz_class> v(a.c.size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = a.c[i] - b.c[i];
        return BinForm(a.d, std::move(v));
    }

    mpz_class eval(const mpz_class& x, const mpz_class& y) const {
        std::vector<mpz_class> xp(d + 1), yp(d + 1);
        xp[0] = 1;
        yp[0] = 1;
        for (long j = 1; j <= d; ++j) {
            xp[j] = xp[j - 1] * x;
            yp[j] = yp[j - 1] * y;
        }
        mpz_class acc = 0;
        for (long j = 0; j <= d; ++j) acc += c[j] * xp[j] * yp[d - j];
        return acc;
    }
    BigFloat eval_f(const BigFloat& x, const BigFloat& y) const {
        std::vector<BigFloat> xp(d + 1), yp(d + 1);
        xp[0] = BigFloat::from(1L);
        yp[0] = BigFloat::from(1L);
        for (long j = 1; j <= d; ++j) {
            xp[j] = xp[j - 1] * x;
            yp[j] = yp[j - 1] * y;
        }
        BigFloat acc;
        for (long j = 0; j <= d; ++j) {
            if (c[j] == 0) continue;
            acc += BigFloat::from(c[j]) * xp[j] * yp[d - j];
        }
        return acc;
    }
    BigComplex eval_c(const BigComplex& x, const BigComplex& y) const {
        std::vector<BigComplex> xp(d + 1), yp(d + 1);
        xp[0] = BigComplex::from(1.0, 0.0);
        yp[0] = BigComplex::from(1.0, 0.0);
        for (long j = 1; j <= d; ++j) {
            xp[j] = xp[j - 1] * x;
            yp[j] = yp[j - 1] * y;
        }
        BigComplex acc;
        for (long j = 0; j <= d; ++j) {
            if (c[j] == 0) continue;
            acc = acc + BigFloat::from(c[j]) * (xp[j] * yp[d - j]);
        }
        return acc;
    }

    // X- and Y-partials, as forms of degree d-1
    BinForm dx() const {
        if (d == 0) return BinForm(0, {mpz_class(0)});
        std::vector<mpz_class> v(d);
        for (long j = 1; j <= d; ++j) v[j - 1] = mpz_class(j) * c[j];
        return BinForm(d - 1, std::move(v));
    }
    BinForm dy() const {
        if (d == 0) return BinForm(0, {mpz_class(0)});
        std::vector<mpz_class> v(d);
        for (long j = 0; j < d; ++j) v[j] = mpz_class(d - j) * c[j];
        return BinForm(d - 1, std::move(v));
    }

    mpz_class l1_norm() const {
        mpz_class s = 0;
        for (const auto& a : c) s += abs(a);
        return s;
    }

    // substitute (X, Y) <- (P, Q), forms of equal degree e; result degree d*e
    BinForm compose(const BinForm& P, const BinForm& Q) const {
        if (P.d != Q.d) throw InputError("BinForm::compose: degree mismatch");
        long e = P.d;
        std::vector<BinForm> xp, yp; // P^j, Q^j
        BinForm one(0, {mpz_class(1)});
        xp.push_back(one);
        yp.push_back(one);
        for (long j = 1; j <= d; ++j) {
            xp.push_back(xp.back() * P);
            yp.push_back(yp.back() * Q);
        }
        std::vector<mpz_class> v(d * e + 1);
        BinForm acc(d * e, std::move(v));
        for (long j = 0; j <= d; ++j) {
            if (c[j] == 0) continue;
            BinForm term = xp[j] * yp[d - j];
            for (long i = 0; i <= term.d; ++i) acc.c[i] += c[j] * term.c[i];
        }
        return acc;
    }
};

namespace detail {

// determinant by subset dynamic programming (division-free), n <= ~16
template <class Ring, class MulFn, class AddSubFn>
Ring det_subsets(const std::vector<std::vector<Ring>>& a, MulFn mul, AddSubFn addsub, Ring zero,
                 Ring one) {
    size_t n = a.size();
    std::vector<Ring> f(size_t(1) << n, zero);
    f[0] = one;
    for (size_t s = 1; s < f.size(); ++s) {
        size_t row = static_cast<size_t>(__builtin_popcountll(s)) - 1;
        Ring acc = zero;
        for (size_t j = 0, seen = 0; j < n; ++j) {
            if (!(s >> j & 1)) continue;
            // Laplace expansion along the last row: sign (-1)^(row + column position)
            Ring term = mul(a[row][j], f[s ^ (size_t(1) << j)]);
            acc = addsub(acc, term, ((row + seen) % 2) == 0);
            ++seen;
        }
        f[s] = acc;
    }
    return f.back();
}

inline mpz_class det_z(const std::vector<std::vector<mpz_class>>& a) {
    return det_subsets<mpz_class>(
        a, [](const mpz_class& x, const mpz_class& y) { return mpz_class(x * y); },
        [](const mpz_class& x, const mpz_class& y, bool plus) {
            return plus ? mpz_class(x + y) : mpz_class(x - y);
        },
        mpz_class(0), mpz_class(1));
}

inline IntPoly reduce_mod(const IntPoly& p, const mpz_class& m) {
    if (m == 0) return p;
    std::vector<mpz_class> v(p.c.size());
    for (size_t i = 0; i < v.size(); ++i) mpz_mod(v[i].get_mpz_t(), p.c[i].get_mpz_t(), m.get_mpz_t());
    return IntPoly(std::move(v));
}

// determinant over Z[x] (m = 0) or (Z/m)[x]
inline IntPoly det_poly(const std::vector<std::vector<IntPoly>>& a, const mpz_class& m) {
    return det_subsets<IntPoly>(
        a,
        [&m](const IntPoly& x, const IntPoly& y) { return reduce_mod(x * y, m); },
        [&m](const IntPoly& x, const IntPoly& y, bool plus) {
            return reduce_mod(plus ? x + y : x - y, m);
        },
        IntPoly{}, IntPoly::constant(1));
}

// Sylvester matrix of declared-degree coefficient vectors (highest power first rows)
inline std::vector<std::vector<mpz_class>> sylvester(const std::vector<mpz_class>& a, long m,
                                                     const std::vector<mpz_class>& b, long n) {
    std::vector<std::vector<mpz_class>> s(m + n, std::vector<mpz_class>(m + n, mpz_class(0)));
    for (long i = 0; i < n; ++i)
        for (long k = 0; k <= m; ++k) s[i][i + k] = a[m - k];
    for (long i = 0; i < m; ++i)
        for (long k = 0; k <= n; ++k) s[n + i][i + k] = b[n - k];
    return s;
}

} // namespace detail

// Sylvester resultant of two forms under their declared degrees
inline mpz_class resultant(const BinForm& F, const BinForm& G) {
    return detail::det_z(detail::sylvester(F.c, F.d, G.c, G.d));
}

inline BinForm wronskian(const BinForm& F, const BinForm& G) {
    return F.dx() * G.dy() - F.dy() * G.dx();
}

// exact division of forms (throws if not divisible)
inline BinForm divexact_form(const BinForm& A, const BinForm& B) {
    if (B.is_zero()) throw InputError("divexact_form: zero divisor");
    if (A.is_zero()) throw InputError("divexact_form: zero dividend");
    long ax = 0, bx = 0;
    while (A.c[ax] == 0) ++ax;
    while (B.c[bx] == 0) ++bx;
    long ay = A.infinity_multiplicity(), by = B.infinity_multiplicity();
    if (ax < bx || ay < by) throw InputError("divexact_form: not divisible (monomial part)");
    IntPoly pa(std::vector<mpz_class>(A.c.begin() + ax, A.c.end() - ay));
    IntPoly pb(std::vector<mpz_class>(B.c.begin() + bx, B.c.end() - by));
    IntPoly q = divexact(pa, pb);
    long qd = A.d - B.d;
    std::vector<mpz_class> v(qd + 1);
    for (long j = 0; j <= q.deg(); ++j) v[j + (ax - bx)] = q.c[j];
    return BinForm(qd, std::move(v));
}

// integral cofactor forms (A, B) of degree d-1 with A*F + B*G = Res * X^(2d-1)
// (rhs_x = true) or Res * Y^(2d-1) (rhs_x = false); solved over Q, integral by
// the adjugate identity
inline std::pair<IntPoly, IntPoly> resultant_cofactors(const BinForm& F, const BinForm& G,
                                                       const mpz_class& res, bool rhs_x) {
    if (F.d != G.d) throw InputError("resultant_cofactors: degree mismatch");
    long d = F.d, n = 2 * d;
    std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n + 1, mpq_class(0)));
    for (long k = 0; k < n; ++k) {
        for (long i = 0; i < d; ++i) {
            long j = k - i;
            if (j >= 0 && j <= d) {
                m[k][i] = F.c[j];
                m[k][d + i] = G.c[j];
            }
        }
    }
    m[rhs_x ? n - 1 : 0][n] = res;
    // Gaussian elimination
    for (long col = 0, row = 0; col < n && row < n; ++col) {
        long piv = -1;
        for (long r = row; r < n; ++r)
            if (m[r][col] != 0) { piv = r; break; }
        if (piv < 0) throw NumericError("resultant_cofactors: singular system");
        std::swap(m[piv], m[row]);
        for (long r = 0; r < n; ++r) {
            if (r == row || m[r][col] == 0) continue;
            mpq_class f = m[r][col] / m[row][col];
            for (long cc = col; cc <= n; ++cc) m[r][cc] -= f * m[row][cc];
        }
        ++row;
    }
    std::vector<mpz_class> a(d), b(d);
    for (long i = 0; i < n; ++i) {
        mpq_class x = m[i][n] / m[i][i];
        if (x.get_den() != 1) throw NumericError("resultant_cofactors: non-integral solution");
        (i < d ? a[i] : b[i - d]) = mpz_class(x.get_num());
    }
    return {IntPoly(std::move(a)), IntPoly(std::move(b))};
}

// resultant of the divisor form m with Y'*F - X'*G, eliminating (X, Y): the
// image form of degree deg(m) in (X', Y'), computed division-free so that the
// same code is valid with coefficients reduced mod p^M (modulus != 0)
inline BinForm pushforward_form(const BinForm& m, const BinForm& F, const BinForm& G,
                                const mpz_class& modulus = 0) {
    long D = m.d, d = F.d;
    // rows of the Sylvester matrix over Z[x'], x' = X'/Y'
    std::vector<IntPoly> mc(D + 1), lc(d + 1);
    for (long j = 0; j <= D; ++j) mc[j] = IntPoly::constant(m.c[j]);
    for (long j = 0; j <= d; ++j) lc[j] = IntPoly(std::vector<mpz_class>{F.c[j], -G.c[j]});
    std::vector<std::vector<IntPoly>> s(D + d, std::vector<IntPoly>(D + d));
    for (long i = 0; i < d; ++i)
        for (long k = 0; k <= D; ++k) s[i][i + k] = mc[D - k];
    for (long i = 0; i < D; ++i)
        for (long k = 0; k <= d; ++k) s[d + i][i + k] = lc[d - k];
    IntPoly det = detail::det_poly(s, modulus);
    if (det.deg() > D) throw NumericError("pushforward_form: degree overflow");
    std::vector<mpz_class> v(D + 1);
    for (long j = 0; j <= det.deg(); ++j) v[j] = det.c[j];
    return BinForm(D, std::move(v));
}

// is the form a nonzero constant times the d-th power of a linear form?
inline bool is_power_of_linear(const BinForm& f) {
    if (f.is_zero()) return false;
    if (f.d == 0) return false;
    long a = 0;
    while (f.c[a] == 0) ++a;
    long b = f.infinity_multiplicity();
    if (a == f.d || b == f.d) return true; // X^d or Y^d up to constant
    if (a > 0 || b > 0) return false;      // mixed root at 0/infinity plus others
    IntPoly p = f.dehomogenize().primitive_part();
    IntPoly s = squarefree_part(p);
    if (s.deg() != 1) return false;
    IntPoly power = IntPoly::constant(1);
    for (long i = 0; i < f.d; ++i) power = power * s;
    if (power.lead() < 0) power = -power;
    IntPoly q = p.lead() < 0 ? -p : p;
    return power == q;
}

} // namespace adelheight
