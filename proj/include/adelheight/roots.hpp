#pragma once

// Simultaneous complex root finding (Aberth-Ehrlich) at MPFR precision.
// Integer polynomials are first split into squarefree factors (exact gcd), so
// the solver only ever sees simple roots and multiplicities are exact; the
// distance-merge step remains as a safety net.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "adelheight/bigfloat.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/rng.hpp"

namespace adelheight {

struct ComplexApprox {
    BigComplex value;
    BigFloat residual;   // >= |p(value)| for the source polynomial
    BigFloat root_error; // Newton-style distance bound to the matched true root
    unsigned multiplicity = 1;
};

namespace detail {

inline BigComplex cpoly_eval(const std::vector<BigComplex>& c, const BigComplex& x) {
    BigComplex acc;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

inline std::vector<BigComplex> cpoly_derivative(const std::vector<BigComplex>& c) {
    std::vector<BigComplex> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(BigFloat::from(double(i)) * c[i]);
    if (d.empty()) d.push_back(BigComplex{});
    return d;
}

// all roots of a complex polynomial with nonzero leading coefficient;
// converges for simple roots, near-multiple roots cluster
inline std::vector<BigComplex> aberth(const std::vector<BigComplex>& coeffs, uint64_t seed,
                                      mpfr_prec_t prec, int max_iters = 400) {
    size_t n = coeffs.size() - 1;
    std::vector<BigComplex> z(n);
    if (n == 0) return z;
    PrecisionGuard guard(prec);
    std::vector<BigComplex> c(coeffs); // re-rounded at working precision
    for (auto& x : c) x = BigComplex{BigFloat::from(0.0) + x.re, BigFloat::from(0.0) + x.im};
    std::vector<BigComplex> dc = cpoly_derivative(c);

    // Fujiwara root bound: 2 max_k |c_{n-k}/c_n|^(1/k); far tighter than the
    // Cauchy bound when the low coefficients dwarf the leading one
    double llead = log(abs(c[n])).to_double();
    double radius = 0.0;
    for (size_t i = 0; i < n; ++i) {
        BigFloat a = abs(c[i]);
        if (a.is_zero()) continue;
        radius = std::max(radius, std::exp((log(a).to_double() - llead) / double(n - i)));
    }
    radius = 2.0 * radius + 0x1p-30;
    SplitMix64 rng(seed ^ 0xabe27119u);
    double phase = rng.next_unit() * 6.283185307179586;
    for (size_t j = 0; j < n; ++j) {
        double theta = 6.283185307179586 * (double(j) + 0.5) / double(n) + phase;
        double rr = radius * (1.0 + 0.05 * rng.next_unit());
        z[j] = BigComplex::from(rr * std::cos(theta), rr * std::sin(theta));
    }

    BigFloat stop = ldexp2(BigFloat::from(radius), -static_cast<long>(prec) + 4);
    for (int it = 0; it < max_iters; ++it) {
        BigFloat worst = BigFloat::from(0.0);
        for (size_t j = 0; j < n; ++j) {
            BigComplex pv = cpoly_eval(c, z[j]);
            if (pv.is_zero()) continue;
            BigComplex dv = cpoly_eval(dc, z[j]);
            if (dv.is_zero()) {
                z[j] = z[j] + BigComplex::from(1e-6 * (rng.next_unit() - 0.5),
                                               1e-6 * (rng.next_unit() - 0.5));
                worst = BigFloat::from(1.0);
                continue;
            }
            BigComplex nj = pv / dv;
            BigComplex s;
            for (size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                BigComplex diff = z[j] - z[k];
                if (diff.is_zero())
                    diff = BigComplex::from(1e-20, 1e-20);
                s = s + BigComplex::from(1.0, 0.0) / diff;
            }
            BigComplex denom = BigComplex::from(1.0, 0.0) - nj * s;
            BigComplex w = denom.is_zero() ? nj : nj / denom;
            z[j] = z[j] - w;
            worst = max(worst, abs(w));
        }
        if (worst < stop) break;
    }
    return z;
}

inline bool complex_before(const BigComplex& a, const BigComplex& b) {
    int c = cmp(a.re, b.re);
    if (c != 0) return c < 0;
    return cmp(a.im, b.im) < 0;
}

} // namespace detail

// roots of an integer polynomial with exact multiplicities; residuals measured
// against p itself; precision escalates until every residual is <= tol
inline std::vector<ComplexApprox> complex_roots(const IntPoly& p, double tol, uint64_t seed = 0) {
    if (p.is_zero()) throw InputError("complex_roots: zero polynomial");
    if (tol <= 0) throw InputError("complex_roots: tol must be positive");
    std::vector<ComplexApprox> out;
    if (p.deg() == 0) return out;

    auto factors = squarefree_decomposition(p);

    mpfr_prec_t prec = std::max<mpfr_prec_t>(default_precision(), 128);
    for (int attempt = 0; attempt < 8; ++attempt, prec *= 2) {
        PrecisionGuard guard(prec);
        out.clear();
        bool ok = true;
        for (const auto& [factor, mult] : factors) {
            size_t n = factor.deg();
            std::vector<BigComplex> fc(n + 1);
            for (size_t i = 0; i <= n; ++i)
                fc[i] = BigComplex{BigFloat::from(factor.coeff(i)), BigFloat::from(0.0)};
            std::vector<BigComplex> roots = detail::aberth(fc, seed, prec);
            std::vector<BigComplex> dfc = detail::cpoly_derivative(fc);
            for (auto& r : roots) {
                // one extra Newton polish on the squarefree factor
                BigComplex pv = detail::cpoly_eval(fc, r);
                BigComplex dv = detail::cpoly_eval(dfc, r);
                if (!dv.is_zero()) r = r - pv / dv;
                ComplexApprox ca;
                ca.value = r;
                pv = detail::cpoly_eval(fc, r);
                dv = detail::cpoly_eval(dfc, r);
                BigFloat fuzz = ldexp2(BigFloat::from(1.0) + abs(r), -static_cast<long>(prec) + 8);
                ca.root_error =
                    dv.is_zero() ? BigFloat::from(1.0)
                                 : BigFloat::from(double(n) * double(mult)) * abs(pv) / abs(dv) + fuzz;
                ca.multiplicity = mult;
                out.push_back(std::move(ca));
            }
        }
        // safety-net merge of near-identical roots
        std::sort(out.begin(), out.end(), [](const ComplexApprox& a, const ComplexApprox& b) {
            return detail::complex_before(a.value, b.value);
        });
        BigFloat merge_radius = BigFloat::pow2(-static_cast<long>(default_precision()) / 4);
        for (size_t i = 0; i + 1 < out.size();) {
            if (abs(out[i].value - out[i + 1].value) < merge_radius) {
                out[i].multiplicity += out[i + 1].multiplicity;
                out[i].root_error = max(out[i].root_error, out[i + 1].root_error);
                out.erase(out.begin() + i + 1);
            } else {
                ++i;
            }
        }
        // residuals against the full polynomial
        BigFloat tolf = BigFloat::from(tol);
        for (auto& ca : out) {
            BigComplex x = ca.value;
            BigComplex acc;
            for (size_t i = p.c.size(); i-- > 0;) {
                acc = acc * x;
                acc.re += BigFloat::from(p.c[i]);
            }
            BigFloat slack = BigFloat::from(1.0) + BigFloat::from(4.0 * double(p.c.size())) *
                                                       BigFloat::pow2(-static_cast<long>(prec) + 2);
            ca.residual = abs(acc) * slack;
            if (!(ca.residual <= tolf)) ok = false;
        }
        size_t total = 0;
        for (const auto& ca : out) total += ca.multiplicity;
        if (total != static_cast<size_t>(p.deg())) ok = false;
        if (ok) return out;
    }
    throw NumericError("complex_roots: residuals did not reach tolerance within precision budget");
}

// roots of a complex polynomial given by declared-degree coefficients; degree
// drop at the top is returned as extra_infinity (projective roots at (1:0))
struct ComplexFormRoots {
    std::vector<BigComplex> finite;
    long infinity = 0;
};

inline ComplexFormRoots complex_roots_declared(std::vector<BigComplex> coeffs, uint64_t seed) {
    ComplexFormRoots out;
    // drop negligible leading coefficients (relative threshold)
    BigFloat scale = BigFloat::from(0.0);
    for (const auto& c : coeffs) scale = max(scale, abs(c));
    if (scale.is_zero()) throw InputError("complex_roots_declared: zero polynomial");
    BigFloat cut = ldexp2(scale, -static_cast<long>(default_precision()) + 16);
    while (coeffs.size() > 1 && abs(coeffs.back()) <= cut) {
        coeffs.pop_back();
        ++out.infinity;
    }
    out.finite = detail::aberth(coeffs, seed, default_precision());
    std::sort(out.finite.begin(), out.finite.end(), detail::complex_before);
    return out;
}

} // namespace adelheight
