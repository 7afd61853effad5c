#pragma once

// Archimedean equidistribution experiments: weighted complex clouds cut out by
// f^n(x) = f^m(x), backward-iteration samples of the equilibrium measure,
// moment / angular-discrepancy statistics between clouds, and parameter-plane
// clouds of PCF parameters for x^2 + c. Weights are exact rationals, so every
// cloud sums to 1 exactly; all floating work happens in the point coordinates.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "adelheight/binform.hpp"
#include "adelheight/dynmap.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/rng.hpp"
#include "adelheight/roots.hpp"

namespace adelheight {

struct CloudPoint {
    BigComplex z;
    mpq_class weight; // positive
};

struct WeightedPointCloud {
    std::vector<CloudPoint> points;

    mpq_class total_weight() const {
        mpq_class s = 0;
        for (const auto& p : points) s += p.weight;
        return s;
    }
};

// what to divide out of the level form f^n - f^m before root finding
enum class DedupMode {
    None,     // every finite solution, multiplicity-weighted
    Monomial, // strip solutions at 0 and infinity (monomial factors)
    Reduced,  // additionally strip every lower level (n-k, m-k) by exact gcd division
};

namespace detail {

// lift of the k-th iterate; k = 0 gives (X, Y)
inline std::pair<BinForm, BinForm> iterate_lift(const RationalMap& f, long k) {
    BinForm A(1, {mpz_class(0), mpz_class(1)});
    BinForm B(1, {mpz_class(1), mpz_class(0)});
    for (long i = 0; i < k; ++i) {
        BinForm A2 = f.F.compose(A, B);
        BinForm B2 = f.G.compose(A, B);
        A = std::move(A2);
        B = std::move(B2);
    }
    return {A, B};
}

// dehomogenized primitive level polynomial, deduplicated as requested
inline IntPoly level_poly(const RationalMap& f, long n, long m, DedupMode mode) {
    auto [Fn, Gn] = iterate_lift(f, n);
    auto [Fm, Gm] = iterate_lift(f, m);
    IntPoly p = (Fn * Gm - Fm * Gn).primitive_part().dehomogenize();
    if (mode == DedupMode::None) return p;
    size_t v = 0;
    while (v < p.c.size() && p.c[v] == 0) ++v;
    if (v > 0) p = IntPoly(std::vector<mpz_class>(p.c.begin() + v, p.c.end()));
    if (mode == DedupMode::Monomial) return p;
    for (long k = 1; k <= m; ++k) {
        IntPoly q = level_poly(f, n - k, m - k, DedupMode::Monomial);
        for (IntPoly g = gcd(p, q); g.deg() > 0; g = gcd(p, q)) p = divexact_q(p, g);
    }
    return p.primitive_part();
}

} // namespace detail

// equal-weight (multiplicity-counted) cloud of the finite solutions of
// f^n(x) = f^m(x); root residuals are certified <= tol
inline WeightedPointCloud preperiodic_cloud(const RationalMap& f, long n, long m, double tol,
                                            DedupMode mode = DedupMode::Monomial) {
    if (m < 0 || n <= m) throw InputError("preperiodic_cloud: need n > m >= 0");
    if (!(tol > 0)) throw InputError("preperiodic_cloud: tolerance must be positive");
    IntPoly p = detail::level_poly(f, n, m, mode);
    if (p.deg() <= 0) throw InputError("preperiodic_cloud: no finite points left at this level");
    std::vector<ComplexApprox> roots = complex_roots(p, tol);
    WeightedPointCloud out;
    out.points.reserve(roots.size());
    long N = p.deg();
    for (const auto& r : roots) {
        mpq_class w(static_cast<unsigned long>(r.multiplicity), static_cast<unsigned long>(N));
        w.canonicalize();
        out.points.push_back({r.value, std::move(w)});
    }
    return out;
}

namespace detail {

// beta*F - alpha*G: vanishes exactly on the preimages of (alpha : beta)
inline BinForm preimage_form(const RationalMap& f, const ProjPoint& x) {
    std::vector<mpz_class> v(f.d + 1);
    for (long j = 0; j <= f.d; ++j) v[j] = x.b * f.F.c[j] - x.a * f.G.c[j];
    return BinForm(f.d, std::move(v));
}

// unique projective root of a power-of-linear form
inline ProjPoint linear_root(const BinForm& h) {
    if (h.infinity_multiplicity() == h.d) return ProjPoint::infinity();
    IntPoly p = h.dehomogenize();
    mpq_class r(-p.c[p.deg() - 1], mpz_class(h.d) * p.lead());
    r.canonicalize();
    return ProjPoint::from_rational(r);
}

// exceptional points have grand orbits with at most two elements: either a
// totally invariant point or a swapped totally invariant pair
inline void require_non_exceptional(const RationalMap& f, const ProjPoint& start) {
    BinForm h0 = preimage_form(f, start);
    if (!is_power_of_linear(h0)) return;
    ProjPoint b = linear_root(h0);
    if (b == start)
        throw InputError("equilibrium_cloud: start point is exceptional (totally invariant); "
                         "pass a start outside the finite grand orbit");
    BinForm h1 = preimage_form(f, b);
    if (is_power_of_linear(h1) && linear_root(h1) == start)
        throw InputError("equilibrium_cloud: start point lies in a finite grand orbit; "
                         "pass a start outside it");
}

} // namespace detail

// `count` samples of the equilibrium measure: each is the end of a depth-step
// backward orbit from `start`, choosing uniformly among the d preimages at
// every step; deterministic in (seed, index)
inline WeightedPointCloud equilibrium_cloud(const RationalMap& f, long depth, long count,
                                            uint64_t seed, const ProjPoint& start = ProjPoint(2, 1)) {
    if (depth < 1 || count < 1) throw InputError("equilibrium_cloud: need depth >= 1 and count >= 1");
    detail::require_non_exceptional(f, start);
    PrecisionGuard guard(96); // statistical sampling; backward steps contract, errors do not stack
    std::vector<BigComplex> fc(f.d + 1), gc(f.d + 1);
    for (long j = 0; j <= f.d; ++j) {
        fc[j] = BigComplex(BigFloat::from(f.F.c[j]), BigFloat::from(0.0));
        gc[j] = BigComplex(BigFloat::from(f.G.c[j]), BigFloat::from(0.0));
    }
    WeightedPointCloud out;
    out.points.reserve(count);
    for (long i = 0; i < count; ++i) {
        SplitMix64 rng = SplitMix64::derive(seed, static_cast<uint64_t>(i));
        bool at_inf = start.is_infinity();
        BigComplex z;
        if (!at_inf) {
            mpq_class x0(start.a, start.b);
            x0.canonicalize();
            z = BigComplex(BigFloat::from(x0), BigFloat::from(0.0));
        }
        for (long s = 0; s < depth; ++s) {
            std::vector<BigComplex> h(f.d + 1);
            for (long j = 0; j <= f.d; ++j) h[j] = at_inf ? -gc[j] : fc[j] - z * gc[j];
            ComplexFormRoots pre = complex_roots_declared(std::move(h), rng.next());
            uint64_t u = rng.next_below(static_cast<uint64_t>(f.d));
            if (u < pre.finite.size()) {
                z = pre.finite[u];
                at_inf = false;
            } else {
                at_inf = true;
            }
        }
        if (at_inf)
            throw NumericError("equilibrium_cloud: sample path ended at infinity; "
                               "choose a different start");
        mpq_class w(1, static_cast<unsigned long>(count));
        out.points.push_back({z, std::move(w)});
    }
    return out;
}

// image cloud under f, weights untouched
inline WeightedPointCloud pushforward_cloud(const RationalMap& f, const WeightedPointCloud& cloud) {
    std::vector<BigComplex> fc(f.d + 1), gc(f.d + 1);
    for (long j = 0; j <= f.d; ++j) {
        fc[j] = BigComplex(BigFloat::from(f.F.c[j]), BigFloat::from(0.0));
        gc[j] = BigComplex(BigFloat::from(f.G.c[j]), BigFloat::from(0.0));
    }
    WeightedPointCloud out;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) {
        BigComplex num = detail::cpoly_eval(fc, p.z);
        BigComplex den = detail::cpoly_eval(gc, p.z);
        if (abs(den).is_zero()) throw NumericError("pushforward_cloud: image at infinity");
        out.points.push_back({num / den, p.weight});
    }
    return out;
}

struct DiscrepancyReport {
    double moment_distance = 0;              // max over z^j conj(z)^k, 1 <= j+k <= J
    std::optional<double> angular_distance;  // sup-CDF angle distance; both clouds on the unit circle
};

namespace detail {

inline std::vector<std::complex<double>> cloud_moments(const WeightedPointCloud& c, long J) {
    std::vector<std::complex<double>> out;
    for (long j = 0; j <= J; ++j) {
        for (long k = 0; j + k <= J; ++k) {
            if (j + k == 0) continue;
            std::complex<double> s = 0;
            for (const auto& p : c.points) {
                std::complex<double> z(p.z.re.to_double(), p.z.im.to_double());
                std::complex<double> t = p.weight.get_d();
                for (long a = 0; a < j; ++a) t *= z;
                for (long a = 0; a < k; ++a) t *= std::conj(z);
                s += t;
            }
            out.push_back(s);
        }
    }
    return out;
}

inline bool on_unit_circle(const WeightedPointCloud& c, double tol = 1e-6) {
    for (const auto& p : c.points) {
        double r = std::hypot(p.z.re.to_double(), p.z.im.to_double());
        if (std::fabs(r - 1.0) > tol) return false;
    }
    return true;
}

inline std::vector<std::pair<double, double>> angle_events(const WeightedPointCloud& c, double sgn) {
    std::vector<std::pair<double, double>> ev;
    ev.reserve(c.points.size());
    for (const auto& p : c.points) {
        double t = std::atan2(p.z.im.to_double(), p.z.re.to_double()) / (2 * M_PI);
        if (t < 0) t += 1.0;
        ev.emplace_back(t, sgn * p.weight.get_d());
    }
    return ev;
}

// sup over angles of |F_a - F_b| for the two angular CDFs
inline double angular_cdf_distance(const WeightedPointCloud& a, const WeightedPointCloud& b) {
    std::vector<std::pair<double, double>> ev = angle_events(a, 1.0);
    std::vector<std::pair<double, double>> evb = angle_events(b, -1.0);
    ev.insert(ev.end(), evb.begin(), evb.end());
    std::sort(ev.begin(), ev.end());
    double s = 0, d = 0;
    for (size_t i = 0; i < ev.size();) {
        size_t j = i;
        while (j < ev.size() && ev[j].first == ev[i].first) s += ev[j++].second;
        d = std::max(d, std::fabs(s));
        i = j;
    }
    return d;
}

} // namespace detail

inline DiscrepancyReport discrepancy(const WeightedPointCloud& a, const WeightedPointCloud& b, long J) {
    if (J < 1) throw InputError("discrepancy: need J >= 1");
    std::vector<std::complex<double>> ma = detail::cloud_moments(a, J);
    std::vector<std::complex<double>> mb = detail::cloud_moments(b, J);
    DiscrepancyReport rep;
    for (size_t i = 0; i < ma.size(); ++i)
        rep.moment_distance = std::max(rep.moment_distance, std::abs(ma[i] - mb[i]));
    if (detail::on_unit_circle(a) && detail::on_unit_circle(b))
        rep.angular_distance = detail::angular_cdf_distance(a, b);
    return rep;
}

// sup over t of |mass of angles in [0, t) - t/(2 pi)|; circle-supported clouds only.
// N equally spaced unit-weight points score exactly 1/N.
inline double angular_star_discrepancy(const WeightedPointCloud& cloud) {
    if (cloud.points.empty()) throw InputError("angular_star_discrepancy: empty cloud");
    if (!detail::on_unit_circle(cloud))
        throw InputError("angular_star_discrepancy: cloud is not supported on the unit circle");
    std::vector<std::pair<double, double>> ev = detail::angle_events(cloud, 1.0);
    std::sort(ev.begin(), ev.end());
    double w = 0, d = 0;
    for (const auto& [t, dw] : ev) {
        d = std::max(d, std::fabs(w - t));
        w += dw;
        d = std::max(d, std::fabs(w - t));
    }
    d = std::max(d, std::fabs(w - 1.0));
    return d;
}

// parameters c with f_c^n(0) = f_c^m(0) for f_c = x^2 + c, multiplicity-weighted
inline WeightedPointCloud pcf_parameter_cloud(long n, long m, double tol) {
    if (m < 0 || n <= m) throw InputError("pcf_parameter_cloud: need n > m >= 0");
    if (!(tol > 0)) throw InputError("pcf_parameter_cloud: tolerance must be positive");
    std::vector<IntPoly> orbit{IntPoly{}}; // critical orbit of 0 as polynomials in c
    for (long k = 1; k <= n; ++k) orbit.push_back(orbit.back() * orbit.back() + IntPoly::monomial(1, 1));
    IntPoly phi = (orbit[n] - orbit[m]).primitive_part();
    std::vector<ComplexApprox> roots = complex_roots(phi, tol);
    WeightedPointCloud out;
    out.points.reserve(roots.size());
    long N = phi.deg();
    for (const auto& r : roots) {
        mpq_class w(static_cast<unsigned long>(r.multiplicity), static_cast<unsigned long>(N));
        w.canonicalize();
        out.points.push_back({r.value, std::move(w)});
    }
    return out;
}

} // namespace adelheight
