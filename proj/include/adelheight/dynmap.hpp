#pragma once

// Endomorphisms of P^1 over Q as primitive integer lifts (F, G) of equal
// degree d >= 2. Iteration strips the content of the image at every step and
// records the per-prime valuations in a ledger, so the exact unnormalized
// iterate can always be reconstructed while coordinates stay small.

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "adelheight/binform.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

struct ProjPoint {
    mpz_class a, b; // coprime; b >= 0, and a > 0 when b = 0

    ProjPoint() : a(1), b(0) {}
    ProjPoint(mpz_class x, mpz_class y) : a(std::move(x)), b(std::move(y)) {
        if (a == 0 && b == 0) throw InputError("ProjPoint: (0,0) is not a point");
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t());
        if (b < 0 || (b == 0 && a < 0)) {
            a = -a;
            b = -b;
        }
    }
    static ProjPoint from_rational(const mpq_class& x) {
        return ProjPoint(mpz_class(x.get_num()), mpz_class(x.get_den()));
    }
    static ProjPoint infinity() { return ProjPoint(); }

    bool is_infinity() const { return b == 0; }
    mpq_class as_rational() const {
        if (b == 0) throw InputError("ProjPoint: infinity has no affine value");
        return mpq_class(a) / mpq_class(b);
    }
    // max(|a|, |b|): the naive multiplicative height of the point
    mpz_class height_scale() const {
        mpz_class aa = abs(a);
        return aa > b ? aa : b;
    }

    friend bool operator==(const ProjPoint& p, const ProjPoint& q) {
        return p.a == q.a && p.b == q.b;
    }
    friend bool operator<(const ProjPoint& p, const ProjPoint& q) {
        int c = cmp(p.a, q.a);
        return c != 0 ? c < 0 : cmp(p.b, q.b) < 0;
    }

    std::string str() const {
        if (b == 0) return "infinity";
        if (b == 1) return a.get_str();
        return a.get_str() + "/" + b.get_str();
    }
};

struct Moebius {
    mpz_class m[2][2]; // z -> (m00 z + m01) / (m10 z + m11)

    Moebius(mpz_class a, mpz_class b, mpz_class c, mpz_class d) {
        m[0][0] = std::move(a);
        m[0][1] = std::move(b);
        m[1][0] = std::move(c);
        m[1][1] = std::move(d);
        if (det() == 0) throw InputError("Moebius: matrix is singular");
    }
    static Moebius identity() { return Moebius(1, 0, 0, 1); }

    mpz_class det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    bool is_unimodular() const { return abs(det()) == 1; }
    Moebius adjugate() const { return Moebius(m[1][1], -m[0][1], -m[1][0], m[0][0]); }

    ProjPoint apply(const ProjPoint& x) const {
        return ProjPoint(m[0][0] * x.a + m[0][1] * x.b, m[1][0] * x.a + m[1][1] * x.b);
    }
};

struct RationalMap {
    long d = 2;
    BinForm F, G;                 // primitive combined lift, sign-normalized
    mpz_class res;                // resultant of (F, G); nonzero
    PrimeFactorization bad_primes; // factorization of |res|

    // forms of equal degree >= 2; normalizes, caches resultant and bad primes
    static RationalMap from_forms(BinForm f, BinForm g) {
        if (f.d != g.d) throw InputError("RationalMap: lift degrees differ");
        if (f.d < 2) throw InputError("RationalMap: degree must be at least 2");
        RationalMap r;
        r.d = f.d;
        r.F = std::move(f);
        r.G = std::move(g);
        // combined content
        mpz_class c = 0;
        for (const auto& x : r.F.c) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
        for (const auto& x : r.G.c) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
        if (c == 0) throw InputError("RationalMap: zero lift");
        for (auto& x : r.F.c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
        for (auto& x : r.G.c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
        // first nonzero coefficient of G (fallback F) positive
        int sign = 0;
        for (const auto& x : r.G.c)
            if (x != 0) { sign = sgn(x); break; }
        if (sign == 0)
            for (const auto& x : r.F.c)
                if (x != 0) { sign = sgn(x); break; }
        if (sign < 0) {
            r.F = -r.F;
            r.G = -r.G;
        }
        r.res = resultant(r.F, r.G);
        if (r.res == 0) throw InputError("RationalMap: degenerate map (zero resultant)");
        r.bad_primes = factor_integer(abs(r.res));
        return r;
    }

    std::pair<IntPoly, IntPoly> as_rational_function() const {
        return {IntPoly(F.c), IntPoly(G.c)};
    }

    bool has_good_reduction(const mpz_class& p) const { return bad_primes.find(p) == bad_primes.end(); }

    // image under the lift, content-stripped; returns the stripped content
    // through `content_out` when non-null (sign included, so that
    // Phi(a,b) = content * image exactly)
    ProjPoint apply(const ProjPoint& x, mpz_class* content_out = nullptr) const {
        mpz_class A = F.eval(x.a, x.b), B = G.eval(x.a, x.b);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
        // g | res for primitive x, so (A,B) != (0,0)
        mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), g.get_mpz_t());
        if (B < 0 || (B == 0 && A < 0)) {
            A = -A;
            B = -B;
            g = -g;
        }
        if (content_out) *content_out = g;
        ProjPoint y;
        y.a = std::move(A);
        y.b = std::move(B);
        return y;
    }

    mpq_class apply_affine(const mpq_class& x) const {
        ProjPoint y = apply(ProjPoint::from_rational(x));
        return y.as_rational();
    }

    friend bool operator==(const RationalMap& f, const RationalMap& g) {
        return f.F == g.F && f.G == g.G;
    }
};

inline RationalMap build_map(const IntPoly& numerator, const IntPoly& denominator) {
    if (denominator.is_zero()) throw InputError("build_map: zero denominator");
    if (numerator.is_zero()) throw InputError("build_map: zero numerator");
    long d = std::max(numerator.deg(), denominator.deg());
    if (d < 2) throw InputError("build_map: degree must be at least 2");
    return RationalMap::from_forms(BinForm::homogenize(numerator, d),
                                   BinForm::homogenize(denominator, d));
}

struct LedgerEntry {
    long step;           // image that produced the strip (1-based)
    mpz_class p;
    unsigned long v;     // >= 1
};

struct OrbitLedger {
    std::vector<ProjPoint> orbit;   // length n+1, all normalized
    std::vector<LedgerEntry> strips;
    std::vector<int> step_signs;    // sign of the scalar stripped at step k (index k-1)

    // scalar c_n with Phi^n(x0) = c_n * orbit[n], componentwise
    mpz_class reconstruction_scalar(long n, long d) const {
        mpz_class c = 1;
        for (const auto& e : strips) {
            if (e.step > n) continue;
            mpz_class exponent_base = e.p;
            mpz_class pw;
            mpz_class dd(d);
            mpz_class ex;
            mpz_pow_ui(ex.get_mpz_t(), dd.get_mpz_t(), static_cast<unsigned long>(n - e.step));
            if (!ex.fits_ulong_p()) throw NumericError("OrbitLedger: exponent overflow");
            mpz_pow_ui(pw.get_mpz_t(), exponent_base.get_mpz_t(),
                       e.v * ex.get_ui());
            c *= pw;
        }
        for (long k = 1; k <= n && k < static_cast<long>(step_signs.size()) + 1; ++k) {
            if (step_signs[k - 1] < 0) {
                // (-1)^(d^(n-k))
                bool odd = (d % 2 == 1) || (n == k);
                if (odd) c = -c;
            }
        }
        return c;
    }
};

inline OrbitLedger evaluate_orbit(const RationalMap& f, const ProjPoint& x, long n) {
    if (n < 0) throw InputError("evaluate_orbit: n must be nonnegative");
    OrbitLedger led;
    led.orbit.reserve(n + 1);
    led.orbit.push_back(x);
    for (long k = 1; k <= n; ++k) {
        mpz_class content;
        ProjPoint y = f.apply(led.orbit.back(), &content);
        led.step_signs.push_back(content < 0 ? -1 : 1);
        mpz_class g = abs(content);
        for (const auto& [p, e] : f.bad_primes) {
            (void)e;
            unsigned long v = p_valuation(g, p);
            if (v >= 1) {
                led.strips.push_back({k, p, v});
                mpz_class pv;
                mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), v);
                mpz_divexact(g.get_mpz_t(), g.get_mpz_t(), pv.get_mpz_t());
            }
        }
        if (g != 1) throw NumericError("evaluate_orbit: stripped content not supported on bad primes");
        led.orbit.push_back(std::move(y));
    }
    return led;
}

// g o f o g^{-1}; resultant and bad primes are recomputed from scratch
inline RationalMap conjugate(const RationalMap& f, const Moebius& g) {
    Moebius adj = g.adjugate();
    BinForm U(1, {adj.m[0][1], adj.m[0][0]}); // adj00 X + adj01 Y
    BinForm V(1, {adj.m[1][1], adj.m[1][0]});
    BinForm F1 = f.F.compose(U, V), G1 = f.G.compose(U, V);
    std::vector<mpz_class> fc(f.d + 1), gc(f.d + 1);
    for (long i = 0; i <= f.d; ++i) {
        fc[i] = g.m[0][0] * F1.c[i] + g.m[0][1] * G1.c[i];
        gc[i] = g.m[1][0] * F1.c[i] + g.m[1][1] * G1.c[i];
    }
    return RationalMap::from_forms(BinForm(f.d, std::move(fc)), BinForm(f.d, std::move(gc)));
}

struct CriticalDivisor {
    BinForm form; // primitive Wronskian, degree 2d-2
    // squarefree primitive factors with multiplicities; the product of
    // factor^mult equals form up to a positive constant. A factor X means the
    // critical point 0, a factor Y the critical point at infinity.
    std::vector<std::pair<BinForm, unsigned>> factors;
};

inline CriticalDivisor critical_divisor(const RationalMap& f) {
    CriticalDivisor out;
    out.form = wronskian(f.F, f.G).primitive_part();
    long x_mult = 0;
    while (out.form.c[x_mult] == 0) ++x_mult;
    long y_mult = out.form.infinity_multiplicity();
    if (x_mult > 0)
        out.factors.emplace_back(BinForm(1, {mpz_class(0), mpz_class(1)}),
                                 static_cast<unsigned>(x_mult));
    if (y_mult > 0)
        out.factors.emplace_back(BinForm(1, {mpz_class(1), mpz_class(0)}),
                                 static_cast<unsigned>(y_mult));
    IntPoly core(std::vector<mpz_class>(out.form.c.begin() + x_mult, out.form.c.end() - y_mult));
    for (auto& [factor, mult] : squarefree_decomposition(core))
        out.factors.emplace_back(BinForm::homogenize(factor, factor.deg()), mult);
    return out;
}

} // namespace adelheight
