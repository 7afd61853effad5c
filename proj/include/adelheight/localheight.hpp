#pragma once

// Local Green's functions g_v(a,b) = lim d^{-n} log ||Phi^n(a,b)||_v of the
// lift-invariant metric, one place of Q at a time. Values are relative to the
// chosen primitive lift and primitive coordinates; only the sum over all
// places is model-independent. Finite places run in exact modular arithmetic
// with an early exact-zero-tail certificate; the archimedean place iterates
// renormalized MPFR pairs with a geometric tail bound from distortion
// constants.

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "adelheight/bigfloat.hpp"
#include "adelheight/dynmap.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/logreal.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

struct Place {
    bool archimedean = true;
    mpz_class p; // valid when !archimedean; always a verified prime

    static Place arch() { return Place{}; }
    static Place finite(const mpz_class& prime) {
        if (!is_prime(prime)) throw InputError("Place: " + prime.get_str() + " is not prime");
        Place v;
        v.archimedean = false;
        v.p = prime;
        return v;
    }

    friend bool operator==(const Place& a, const Place& b) {
        return a.archimedean == b.archimedean && (a.archimedean || a.p == b.p);
    }
    friend bool operator<(const Place& a, const Place& b) {
        if (a.archimedean != b.archimedean) return a.archimedean; // arch sorts first
        if (a.archimedean) return false;
        return a.p < b.p;
    }
    std::string str() const { return archimedean ? "inf" : p.get_str(); }
};

struct DistortionBounds {
    Place place;
    mpq_class c_lower, c_upper; // c_lower ||z||^d <= ||Phi(z)|| <= c_upper ||z||^d

    // rigorous upper bound for max(|log c_lower|, |log c_upper|)
    double log_gamma() const {
        auto bound = [](const mpq_class& q) {
            double l = std::fabs(log(BigFloat::from(q, MPFR_RNDN, 96)).to_double());
            return l * (1 + 1e-9) + 1e-300;
        };
        return std::max(bound(c_lower), bound(c_upper));
    }
};

inline DistortionBounds distortion_bounds(const RationalMap& f, const Place& v) {
    DistortionBounds out;
    out.place = v;
    if (!v.archimedean) {
        out.c_upper = 1; // integer coefficients: no p-adic expansion
        auto it = f.bad_primes.find(v.p);
        if (it == f.bad_primes.end()) {
            out.c_lower = 1;
        } else {
            mpz_class pv;
            mpz_pow_ui(pv.get_mpz_t(), v.p.get_mpz_t(), it->second);
            out.c_lower = mpq_class(1, pv);
        }
        return out;
    }
    out.c_upper = mpq_class(std::max(f.F.l1_norm(), f.G.l1_norm()));
    // Res * X^(2d-1) = A_x F + B_x G and the Y-counterpart give the lower bound
    mpz_class k_best = 0;
    for (bool rhs_x : {true, false}) {
        auto [A, B] = resultant_cofactors(f.F, f.G, f.res, rhs_x);
        mpz_class k = 0;
        for (const auto& c : A.c) k += abs(c);
        for (const auto& c : B.c) k += abs(c);
        if (k > k_best) k_best = k;
    }
    out.c_lower = mpq_class(abs(f.res), k_best);
    out.c_lower.canonicalize();
    return out;
}

struct LocalGreenValue {
    Place place;
    BigFloat value;
    double error_bound = 0;
    long iterations_used = 0;
    std::optional<LogReal> exact; // set whenever error_bound == 0
};

namespace detail {

// smallest n >= 0 with gamma / (d^n (d-1)) <= tol
inline long green_iterations(double gamma, long d, double tol) {
    double tail = gamma / double(d - 1);
    long n = 0;
    while (tail > tol) {
        tail /= double(d);
        if (++n > 400) throw NumericError("local_green: tolerance is unreachable");
    }
    return n;
}

// canonical representative of the projective class of (a, b) mod p^k,
// assuming one coordinate is a unit
inline std::pair<mpz_class, mpz_class> proj_class(const mpz_class& a, const mpz_class& b,
                                                  const mpz_class& p, const mpz_class& pk) {
    mpz_class inv, ra, rb;
    if (!mpz_divisible_p(a.get_mpz_t(), p.get_mpz_t())) {
        mpz_class am = a % pk;
        if (mpz_invert(inv.get_mpz_t(), am.get_mpz_t(), pk.get_mpz_t()) == 0)
            throw NumericError("proj_class: expected a unit");
        ra = 1;
        mpz_class t = b * inv;
        mpz_mod(rb.get_mpz_t(), t.get_mpz_t(), pk.get_mpz_t());
    } else {
        mpz_class bm = b % pk;
        if (mpz_invert(inv.get_mpz_t(), bm.get_mpz_t(), pk.get_mpz_t()) == 0)
            throw NumericError("proj_class: neither coordinate is a unit");
        rb = 1;
        mpz_class t = a * inv;
        mpz_mod(ra.get_mpz_t(), t.get_mpz_t(), pk.get_mpz_t());
    }
    return {ra, rb};
}

struct PadicSeries {
    mpq_class partial;   // sum of v_k d^{-k} over computed steps
    bool tail_zero = false; // every later v_k is provably 0
    long iterations = 0;
};

// exact valuations of the stripped contents along the orbit of x at p, up to
// n_max steps or until a zero-valuation cycle proves the tail vanishes
inline PadicSeries padic_series(const RationalMap& f, const ProjPoint& x, const mpz_class& p,
                                unsigned long R, long n_max) {
    PadicSeries out;
    // working modulus: R+1 digits must survive n_max strips of at most R each
    unsigned long m = R + 1 + static_cast<unsigned long>(n_max) * R + 8;
    mpz_class pm, pr1;
    mpz_pow_ui(pm.get_mpz_t(), p.get_mpz_t(), m);
    mpz_pow_ui(pr1.get_mpz_t(), p.get_mpz_t(), R + 1);

    mpz_class a, b;
    mpz_mod(a.get_mpz_t(), x.a.get_mpz_t(), pm.get_mpz_t());
    mpz_mod(b.get_mpz_t(), x.b.get_mpz_t(), pm.get_mpz_t());

    mpq_class dk = 1;
    std::map<std::pair<mpz_class, mpz_class>, long> visited;
    visited[proj_class(a, b, p, pr1)] = 0;
    long k = 0;
    while (k < n_max) {
        ++k;
        dk /= f.d;
        mpz_class A = f.F.eval(a, b) % pm, B = f.G.eval(a, b) % pm;
        if (A < 0) A += pm;
        if (B < 0) B += pm;
        unsigned long vA = (A == 0) ? m : p_valuation(A, p);
        unsigned long vB = (B == 0) ? m : p_valuation(B, p);
        unsigned long val = std::min(vA, vB);
        if (val > R) throw NumericError("padic_series: content valuation exceeds its bound");
        if (val > 0) {
            out.partial += mpq_class(static_cast<long>(val)) * dk;
            mpz_class pv;
            mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), val);
            mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), pv.get_mpz_t());
            mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), pv.get_mpz_t());
            m -= val;
            mpz_divexact(pm.get_mpz_t(), pm.get_mpz_t(), pv.get_mpz_t());
            if (m < R + 1) throw NumericError("padic_series: modulus budget exhausted");
            mpz_mod(A.get_mpz_t(), A.get_mpz_t(), pm.get_mpz_t());
            mpz_mod(B.get_mpz_t(), B.get_mpz_t(), pm.get_mpz_t());
            visited.clear(); // classes before a strip must not certify a cycle
        }
        a = std::move(A);
        b = std::move(B);
        auto cls = proj_class(a, b, p, pr1);
        auto [at, fresh] = visited.emplace(std::move(cls), k);
        (void)at;
        if (!fresh) {
            // the class repeated with no strips in between: every future
            // valuation is zero and the accumulated sum is the full limit
            out.tail_zero = true;
            break;
        }
    }
    out.iterations = k;
    return out;
}

inline LocalGreenValue green_finite(const RationalMap& f, const ProjPoint& x, const Place& v,
                                    double tol) {
    LocalGreenValue out;
    out.place = v;
    auto it = f.bad_primes.find(v.p);
    if (it == f.bad_primes.end()) {
        out.exact = LogReal();
        return out; // good reduction, coprime coordinates: exactly 0
    }
    unsigned long R = it->second;
    double logp = std::log(v.p.get_d()) * (1 + 1e-12);
    double gamma = double(R) * logp;
    long n_max = green_iterations(gamma, f.d, tol);

    PadicSeries s = padic_series(f, x, v.p, R, n_max);
    out.iterations_used = s.iterations;
    LogReal exact_val = LogReal::log_prime(v.p, -s.partial);
    out.value = exact_val.to_float();
    if (s.tail_zero) {
        out.error_bound = 0;
        out.exact = exact_val;
    } else {
        out.error_bound = gamma / (std::pow(double(f.d), double(n_max)) * double(f.d - 1)) + 1e-300;
    }
    return out;
}

// partial sums log c0 + sum_{k<=n} d^{-k} log ||Phi(z_{k-1})|| over
// renormalized coordinates, with a crude rounding-error estimate
template <class Coord, class EvalFn, class AbsFn>
std::pair<BigFloat, double> arch_series(const RationalMap& f, Coord a, Coord b,
                                        const AbsFn& absfn, const EvalFn& evalfn, long n) {
    BigFloat s = log(max(absfn(a), absfn(b)));
    {
        BigFloat scale = max(absfn(a), absfn(b));
        a = a / scale;
        b = b / scale;
    }
    BigFloat dk = BigFloat::from(1L);
    BigFloat dinv = BigFloat::from(1L) / BigFloat::from(f.d);
    for (long k = 1; k <= n; ++k) {
        dk *= dinv;
        Coord A = evalfn(f.F, a, b), B = evalfn(f.G, a, b);
        BigFloat mx = max(absfn(A), absfn(B));
        s += dk * log(mx);
        a = A / mx;
        b = B / mx;
    }
    double rounding =
        std::ldexp(double(n + 4) * double(f.d + 16), -int(default_precision()) + 8);
    return {s, rounding};
}

// shared archimedean wrapper over either real or complex coordinate pairs
template <class Coord, class EvalFn, class AbsFn>
LocalGreenValue green_arch_loop(const RationalMap& f, Coord a, Coord b, const AbsFn& absfn,
                                const EvalFn& evalfn, double tol,
                                const mpz_class* exact_scale) {
    LocalGreenValue out;
    out.place = Place::arch();
    DistortionBounds db = distortion_bounds(f, Place::arch());
    bool isometry = db.c_lower == 1 && db.c_upper == 1;
    double gamma = db.log_gamma();
    long n = isometry ? 0 : green_iterations(gamma, f.d, tol);
    out.iterations_used = n;
    if (isometry && exact_scale) {
        // the metric is exactly the sup norm: g = log max(|a|, |b|)
        LogReal ev = LogReal::log_rational(mpq_class(*exact_scale));
        out.value = ev.to_float();
        out.error_bound = 0;
        out.exact = ev;
        return out;
    }
    auto [s, rounding] = arch_series(f, std::move(a), std::move(b), absfn, evalfn, n);
    out.value = s;
    double tail = gamma / (std::pow(double(f.d), double(n)) * double(f.d - 1));
    out.error_bound = tail + rounding + 1e-300;
    return out;
}

inline BigFloat real_abs(const BigFloat& t) { return abs(t); }
inline BigFloat complex_abs(const BigComplex& t) { return abs(t); }
inline BigFloat real_eval(const BinForm& form, const BigFloat& a, const BigFloat& b) {
    return form.eval_f(a, b);
}
inline BigComplex complex_eval(const BinForm& form, const BigComplex& a, const BigComplex& b) {
    return form.eval_c(a, b);
}

} // namespace detail

// local Green's function of f at x for the place v, with |value - g_v| <=
// error_bound <= tol; exact shortcuts where the tail provably vanishes
inline LocalGreenValue local_green(const RationalMap& f, const ProjPoint& x, const Place& v,
                                   double tol) {
    if (tol <= 0) throw InputError("local_green: tol must be positive");
    if (!v.archimedean) return detail::green_finite(f, x, v, tol);
    mpz_class scale = x.height_scale();
    return detail::green_arch_loop(f, BigFloat::from(x.a), BigFloat::from(x.b),
                                   detail::real_abs, detail::real_eval, tol, &scale);
}

// archimedean Green's function at a complex-embedded lift (a, b)
inline LocalGreenValue local_green_embedded(const RationalMap& f, const BigComplex& a,
                                            const BigComplex& b, double tol) {
    if (tol <= 0) throw InputError("local_green_embedded: tol must be positive");
    return detail::green_arch_loop(f, a, b, detail::complex_abs, detail::complex_eval, tol,
                                   nullptr);
}

} // namespace adelheight
