#pragma once

// Global canonical heights. Two independent methods: "local-sum" adds local
// Green's functions over the archimedean place and the bad primes (good
// places vanish on coprime coordinates), "tate-limit" evaluates d^{-n} times
// the naive height of the n-th iterate, with n chosen from the distortion
// bound. Algebraic points are handled through the height mass of their
// minimal polynomial: arch Green's values at the conjugates plus an exact
// p-adic content series of iterated pushforward forms.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adelheight/bigfloat.hpp"
#include "adelheight/binform.hpp"
#include "adelheight/dynmap.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/localheight.hpp"
#include "adelheight/logreal.hpp"
#include "adelheight/quadfield.hpp"
#include "adelheight/roots.hpp"

namespace adelheight {

// C(f): |canonical - naive| <= C(f) everywhere; sum of per-place distortion
// gammas over arch + bad primes, divided by d-1 (upper bound in double)
inline double height_comparison_bound(const RationalMap& f) {
    double g = distortion_bounds(f, Place::arch()).log_gamma();
    for (const auto& [p, e] : f.bad_primes)
        g += distortion_bounds(f, Place::finite(p)).log_gamma();
    return g / double(f.d - 1);
}

inline BigFloat naive_height(const ProjPoint& x) {
    return log(BigFloat::from(x.height_scale()));
}

inline LogReal naive_height_exact(const ProjPoint& x) {
    return LogReal::log_rational(mpq_class(x.height_scale()));
}

// algebraic number given by a squarefree primitive integer polynomial,
// together with refined complex approximations of all its conjugates
struct AlgebraicPoint {
    IntPoly min_poly;
    std::vector<ComplexApprox> conjugates;
    long degree = 0;

    static AlgebraicPoint from_poly(const IntPoly& p, double root_tol = 1e-80) {
        if (p.deg() < 1) throw InputError("AlgebraicPoint: polynomial must be nonconstant");
        AlgebraicPoint out;
        out.min_poly = p.primitive_part();
        if (out.min_poly.lead() < 0) out.min_poly = mpz_class(-1) * out.min_poly;
        if (gcd(out.min_poly, out.min_poly.derivative()).deg() != 0)
            throw InputError("AlgebraicPoint: polynomial must be squarefree");
        out.degree = out.min_poly.deg();
        out.conjugates = complex_roots(out.min_poly, root_tol);
        return out;
    }
};

// (1/D)(log|lead| + sum log max(1, |conjugate|)); second value bounds the
// root-approximation error
inline std::pair<BigFloat, double> naive_height(const AlgebraicPoint& x) {
    BigFloat s = log(abs(BigFloat::from(x.min_poly.lead())));
    double err = 0;
    BigFloat one = BigFloat::from(1L);
    for (const auto& r : x.conjugates) {
        BigFloat m = abs(r.value);
        if (m > one) s += BigFloat::from(long(r.multiplicity)) * log(m);
        err += 2.0 * double(r.multiplicity) * r.root_error.to_double();
    }
    BigFloat d = BigFloat::from(x.degree);
    return {s / d, err / double(x.degree) + 1e-300};
}

struct HeightResult {
    BigFloat value;
    double error_bound = 0;
    std::vector<LocalGreenValue> breakdown;
    std::string method;
    std::optional<LogReal> exact; // set whenever error_bound == 0
};

namespace detail {

// exact content-valuation series of iterated pushforwards of a primitive
// form at p: partial = sum_k v_p(c_k) d^{-k}, with an early certificate that
// all remaining valuations vanish (form class mod p^{B+1} revisited with no
// content strips in between)
inline PadicSeries form_content_series(const RationalMap& f, const BinForm& m0,
                                       const mpz_class& p, unsigned long R, long n_max) {
    PadicSeries out;
    const long D = m0.d;
    unsigned long B = static_cast<unsigned long>(D) * R; // valuation cap per step
    unsigned long mexp = B + 1 + static_cast<unsigned long>(n_max) * B + 8;
    mpz_class pm, pB1;
    mpz_pow_ui(pm.get_mpz_t(), p.get_mpz_t(), mexp);
    mpz_pow_ui(pB1.get_mpz_t(), p.get_mpz_t(), B + 1);

    auto reduce_form = [](const BinForm& q, const mpz_class& mod) {
        BinForm r = q;
        for (auto& c : r.c) mpz_mod(c.get_mpz_t(), c.get_mpz_t(), mod.get_mpz_t());
        return r;
    };
    auto canonical_class = [&](const BinForm& q) {
        // coefficients mod p^{B+1}, scaled so the first unit entry is 1
        std::vector<mpz_class> key(q.c.size());
        long unit = -1;
        for (size_t j = 0; j < q.c.size(); ++j) {
            mpz_mod(key[j].get_mpz_t(), q.c[j].get_mpz_t(), pB1.get_mpz_t());
            if (unit < 0 && key[j] != 0 && !mpz_divisible_p(key[j].get_mpz_t(), p.get_mpz_t()))
                unit = long(j);
        }
        if (unit < 0) throw NumericError("form_content_series: no unit coefficient");
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), key[unit].get_mpz_t(), pB1.get_mpz_t());
        for (auto& k : key) {
            mpz_class t = k * inv;
            mpz_mod(k.get_mpz_t(), t.get_mpz_t(), pB1.get_mpz_t());
        }
        return key;
    };

    BinForm Q = reduce_form(m0, pm);
    std::map<std::vector<mpz_class>, long> visited;
    visited[canonical_class(Q)] = 0;
    mpq_class dk = 1;
    long k = 0;
    while (k < n_max) {
        ++k;
        dk /= f.d;
        BinForm P = pushforward_form(Q, f.F, f.G, pm);
        unsigned long v = mexp;
        for (const auto& c : P.c)
            if (c != 0) v = std::min(v, p_valuation(c, p));
        if (v > B) throw NumericError("form_content_series: content valuation exceeds its bound");
        if (v > 0) {
            out.partial += mpq_class(static_cast<long>(v)) * dk;
            mpz_class pv;
            mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), v);
            for (auto& c : P.c) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pv.get_mpz_t());
            mexp -= v;
            mpz_divexact(pm.get_mpz_t(), pm.get_mpz_t(), pv.get_mpz_t());
            if (mexp < B + 1) throw NumericError("form_content_series: modulus budget exhausted");
            visited.clear();
        }
        Q = reduce_form(P, pm);
        auto [at, fresh] = visited.emplace(canonical_class(Q), k);
        (void)at;
        if (!fresh) {
            out.tail_zero = true;
            break;
        }
    }
    out.iterations = k;
    return out;
}

// log-scale Lipschitz amplification of the n-step archimedean partial sum
// with respect to a perturbation of the starting point
inline double arch_amplification(const RationalMap& f, long n) {
    DistortionBounds db = distortion_bounds(f, Place::arch());
    double cl = db.c_lower.get_d();
    double lam = double(f.d) * (f.F.l1_norm().get_d() + f.G.l1_norm().get_d()) / cl;
    double log_ratio = std::max(0.0, std::log(lam) - std::log(double(f.d)));
    return std::log(double(n) + 2.0) + double(n) * log_ratio; // log of the factor
}

} // namespace detail

// canonical height mass of the root divisor of a binary form: the sum of
// canonical heights of its roots in P^1 (with multiplicity). Exact formula:
// log|lead| + sum of arch Green's values at natural lifts, minus the p-adic
// content series of iterated pushforwards.
inline HeightResult height_mass(const RationalMap& f, const BinForm& m_in, double tol) {
    if (tol <= 0) throw InputError("height_mass: tol must be positive");
    if (m_in.is_zero()) throw InputError("height_mass: zero form");
    HeightResult out;
    out.method = "local-sum";
    if (m_in.d == 0) {
        out.value = BigFloat::from(0L);
        out.exact = LogReal();
        return out;
    }
    BinForm m = m_in.primitive_part();
    const long D = m.d;
    IntPoly q = m.dehomogenize();
    long e_inf = m.infinity_multiplicity();

    double tol_arch = tol / 2;
    size_t nplaces = f.bad_primes.size();
    double tol_fin = nplaces ? tol / (2.0 * double(nplaces)) : 0.0;

    // archimedean part
    long slots = D; // root instances including infinity
    double tol_green = tol_arch / (2.0 * double(slots));
    DistortionBounds db = distortion_bounds(f, Place::arch());
    long n_arch = (db.c_lower == 1 && db.c_upper == 1)
                      ? 0
                      : detail::green_iterations(db.log_gamma(), f.d, tol_green);
    double log_amp = detail::arch_amplification(f, n_arch);

    LocalGreenValue arch;
    arch.place = Place::arch();
    arch.value = log(abs(BigFloat::from(q.lead())));
    arch.iterations_used = n_arch;
    double arch_err = 0;
    if (q.deg() >= 1) {
        // pick the root tolerance so the amplified perturbation stays small
        double lt = std::log(tol_arch / (8.0 * double(D))) - log_amp;
        double root_tol = std::exp(std::max(std::min(lt, std::log(1e-60)), -650.0));
        auto roots = complex_roots(q, root_tol);
        for (const auto& r : roots) {
            LocalGreenValue g = local_green_embedded(f, r.value, BigComplex::from(1, 0), tol_green);
            arch.value += BigFloat::from(long(r.multiplicity)) * g.value;
            arch_err += double(r.multiplicity) *
                        (g.error_bound + std::exp(std::min(log_amp + std::log(std::max(
                                                  r.root_error.to_double(), 1e-300)), 700.0)));
        }
    }
    if (e_inf > 0) {
        LocalGreenValue g = local_green_embedded(f, BigComplex::from(1, 0), BigComplex::from(0, 0),
                                                 tol_green);
        arch.value += BigFloat::from(e_inf) * g.value;
        arch_err += double(e_inf) * g.error_bound;
    }
    arch.error_bound = arch_err + 1e-300;
    out.breakdown.push_back(arch);

    // p-adic content series over the bad primes
    for (const auto& [p, R] : f.bad_primes) {
        double logp = std::log(p.get_d()) * (1 + 1e-12);
        double gamma = double(D) * double(R) * logp;
        long n_max = detail::green_iterations(gamma, f.d, tol_fin);
        detail::PadicSeries s = detail::form_content_series(f, m, p, R, n_max);
        LocalGreenValue lv;
        lv.place = Place::finite(p);
        LogReal ev = LogReal::log_prime(p, -s.partial);
        lv.value = ev.to_float();
        lv.iterations_used = s.iterations;
        if (s.tail_zero) {
            lv.error_bound = 0;
            lv.exact = ev;
        } else {
            lv.error_bound =
                gamma / (std::pow(double(f.d), double(n_max)) * double(f.d - 1)) + 1e-300;
        }
        out.breakdown.push_back(lv);
    }

    BigFloat total = BigFloat::from(0L);
    double err = 0;
    for (const auto& lv : out.breakdown) {
        total += lv.value;
        err += lv.error_bound;
    }
    out.value = total;
    out.error_bound = err + std::ldexp(double(out.breakdown.size() + 4),
                                       -int(default_precision()) + 6);
    return out;
}

enum class HeightMethod { LocalSum, TateLimit };

namespace detail {

inline HeightResult canonical_local_sum(const RationalMap& f, const ProjPoint& x, double tol) {
    HeightResult out;
    out.method = "local-sum";
    size_t nplaces = 1 + f.bad_primes.size();
    double tol_each = tol / double(nplaces);
    out.breakdown.push_back(local_green(f, x, Place::arch(), tol_each));
    for (const auto& [p, e] : f.bad_primes)
        out.breakdown.push_back(local_green(f, x, Place::finite(p), tol_each));
    bool all_exact = true;
    LogReal exact_sum;
    BigFloat total = BigFloat::from(0L);
    double err = 0;
    for (const auto& lv : out.breakdown) {
        total += lv.value;
        err += lv.error_bound;
        if (lv.exact)
            exact_sum += *lv.exact;
        else
            all_exact = false;
    }
    if (all_exact) {
        out.exact = exact_sum;
        out.value = exact_sum.to_float();
        out.error_bound = 0;
    } else {
        out.value = total;
        out.error_bound =
            err + std::ldexp(double(nplaces + 4), -int(default_precision()) + 6) + 1e-300;
    }
    return out;
}

inline HeightResult canonical_tate_limit(const RationalMap& f, const ProjPoint& x, double tol) {
    HeightResult out;
    out.method = "tate-limit";
    DistortionBounds db = distortion_bounds(f, Place::arch());
    bool isometric = db.c_lower == 1 && db.c_upper == 1 && abs(f.res) == 1;
    if (isometric) {
        // naive height is already canonical
        LogReal ev = naive_height_exact(x);
        out.value = ev.to_float();
        out.exact = ev;
        return out;
    }
    double C = height_comparison_bound(f);
    long n = green_iterations(C * double(f.d - 1), f.d, tol * 0.9);
    // d^{-n} log ||Phi^n(a,b)|| from the renormalized float orbit, minus the
    // exact accumulated content d^{-n} log c_n from per-prime ledgers
    auto [s, rounding] = arch_series(f, BigFloat::from(x.a), BigFloat::from(x.b), real_abs,
                                     real_eval, n);
    LogReal corr;
    for (const auto& [p, R] : f.bad_primes) {
        PadicSeries ps = padic_series(f, x, p, R, n);
        corr += LogReal::log_prime(p, -ps.partial);
    }
    out.value = s + corr.to_float();
    out.error_bound = C / std::pow(double(f.d), double(n)) + rounding +
                      std::ldexp(8.0, -int(default_precision()) + 4) + 1e-300;
    return out;
}

} // namespace detail

inline HeightResult canonical_height(const RationalMap& f, const ProjPoint& x, double tol,
                                     HeightMethod method = HeightMethod::LocalSum) {
    if (tol <= 0) throw InputError("canonical_height: tol must be positive");
    if (method == HeightMethod::LocalSum) return detail::canonical_local_sum(f, x, tol);
    return detail::canonical_tate_limit(f, x, tol);
}

// canonical height of an algebraic point: the height mass of its minimal
// polynomial averaged over the conjugates
inline HeightResult canonical_height(const RationalMap& f, const AlgebraicPoint& x, double tol,
                                     HeightMethod method = HeightMethod::LocalSum) {
    if (tol <= 0) throw InputError("canonical_height: tol must be positive");
    const long D = x.degree;
    mpq_class invD(1, D);
    if (method == HeightMethod::LocalSum) {
        HeightResult mass = height_mass(f, BinForm::homogenize(x.min_poly, D), tol * double(D));
        HeightResult out;
        out.method = "local-sum";
        BigFloat bD = BigFloat::from(D);
        for (auto lv : mass.breakdown) {
            lv.value = lv.value / bD;
            lv.error_bound /= double(D);
            if (lv.exact) lv.exact = invD * (*lv.exact);
            out.breakdown.push_back(std::move(lv));
        }
        out.value = mass.value / bD;
        out.error_bound = mass.error_bound / double(D);
        return out;
    }
    // tate-limit: exact pushforward orbit of the minimal polynomial's root
    // divisor; d^{-n} log ||m_n|| / D with the Mahler comparison folded in
    HeightResult out;
    out.method = "tate-limit";
    double C = height_comparison_bound(f) + 0.6932; // per-point Mahler/sup gap
    long n = detail::green_iterations(C * double(f.d - 1), f.d, tol * 0.9);
    BinForm m = BinForm::homogenize(x.min_poly, D).primitive_part();
    mpq_class dk = 1;
    const size_t bit_cap = 1u << 20;
    for (long k = 0; k < n; ++k) {
        size_t bits = 0;
        for (const auto& c : m.c) bits += mpz_sizeinbase(c.get_mpz_t(), 2);
        if (bits > bit_cap)
            throw NumericError("canonical_height: tate-limit tolerance unreachable for this "
                               "degree; use the local-sum method");
        m = pushforward_form(m, f.F, f.G).primitive_part();
        dk /= f.d;
    }
    mpz_class sup = 0;
    for (const auto& c : m.c) sup = std::max(sup, mpz_class(abs(c)));
    out.value = log(BigFloat::from(sup)) * BigFloat::from(dk / D);
    out.error_bound =
        C * dk.get_d() + std::ldexp(8.0, -int(default_precision()) + 4) + 1e-300;
    return out;
}

// --- preperiodicity ---------------------------------------------------

enum class PreperiodicStatus { Preperiodic, Wandering, Undetermined };

struct PreperiodicResult {
    PreperiodicStatus status = PreperiodicStatus::Undetermined;
    long tail = 0;                 // steps before the cycle starts
    std::vector<ProjPoint> cycle;  // rational case
    std::vector<QuadNum> quad_cycle; // quadratic case (empty entries for infinity)
    std::vector<std::string> cycle_repr;
    long witness_step = -1;        // wandering: iterate whose naive height escapes
    double witness_height = 0;     // lower bound for that naive height
    double comparison_bound = 0;   // C(f) upper bound it must exceed
};

inline PreperiodicResult preperiodic_test(const RationalMap& f, const ProjPoint& x,
                                          long budget = 64) {
    PreperiodicResult out;
    out.comparison_bound = height_comparison_bound(f);
    std::map<ProjPoint, long> seen;
    std::vector<ProjPoint> orbit{x};
    seen[x] = 0;
    ProjPoint z = x;
    for (long k = 0; k <= budget; ++k) {
        // escape: naive height above C(f) forces positive canonical height
        double h = std::log(z.height_scale().get_d()) * (1 - 1e-12);
        if (h > out.comparison_bound) {
            out.status = PreperiodicStatus::Wandering;
            out.witness_step = k;
            out.witness_height = h;
            return out;
        }
        z = f.apply(z);
        auto it = seen.find(z);
        if (it != seen.end()) {
            out.status = PreperiodicStatus::Preperiodic;
            out.tail = it->second;
            for (size_t j = size_t(it->second); j < orbit.size(); ++j) {
                out.cycle.push_back(orbit[j]);
                out.cycle_repr.push_back(orbit[j].str());
            }
            return out;
        }
        seen[z] = long(orbit.size());
        orbit.push_back(z);
    }
    out.status = PreperiodicStatus::Undetermined;
    return out;
}

namespace detail {

struct QuadOrbitPoint {
    bool inf = false;
    std::optional<QuadNum> z;
    std::string key() const {
        if (inf) return "inf";
        return z->u.get_str() + "|" + z->v.get_str();
    }
    std::string repr() const {
        if (inf) return "infinity";
        if (z->v == 0) return z->u.get_str();
        return z->u.get_str() + " + " + z->v.get_str() + "*sqrt(" + z->D.get_str() + ")";
    }
};

inline QuadNum quad_eval(const IntPoly& p, const QuadNum& z) {
    QuadNum acc(0, 0, z.D);
    for (long i = p.deg(); i >= 0; --i) acc = acc * z + QuadNum(mpq_class(p.coeff(i)), 0, z.D);
    return acc;
}

// image of a finite quadratic point under f (infinity handled by the caller)
inline QuadOrbitPoint quad_step(const IntPoly& num, const IntPoly& den, const QuadNum& z) {
    QuadNum a = quad_eval(num, z), b = quad_eval(den, z);
    QuadOrbitPoint out;
    if (b.u == 0 && b.v == 0) {
        out.inf = true;
        return out;
    }
    out.z = a / b;
    return out;
}

// naive height of a quadratic irrationality, slightly rounded down
inline double quad_naive_height_lower(const QuadNum& z) {
    if (z.v == 0) {
        mpq_class q = z.u;
        q.canonicalize();
        mpz_class n = abs(q.get_num()), d = q.get_den();
        return std::log(std::max(n, d).get_d()) * (1 - 1e-12);
    }
    // minimal polynomial c2 x^2 + c1 x + c0 from trace and norm
    mpq_class tr = z.trace(), nm = z.norm();
    mpz_class L = lcm(tr.get_den(), nm.get_den());
    mpz_class c2 = L, c1 = -mpz_class(tr * L), c0 = mpz_class(nm * L);
    mpz_class g = gcd(gcd(c2, c1), c0);
    c2 /= g;
    PrecisionGuard guard(128);
    BigFloat u = BigFloat::from(z.u), v = BigFloat::from(z.v);
    BigFloat D = BigFloat::from(z.D);
    BigFloat one = BigFloat::from(1L);
    BigFloat mass;
    if (z.D > 0) {
        BigFloat rt = sqrt(D);
        BigFloat r1 = abs(u + v * rt), r2 = abs(u - v * rt);
        mass = max(one, r1) * max(one, r2);
    } else {
        BigFloat modsq = u * u + abs(v * v * D);
        mass = max(one, modsq);
    }
    BigFloat h = log(BigFloat::from(mpq_class(abs(c2))) * mass) / BigFloat::from(2L);
    return h.to_double() * (1 - 1e-10) - 1e-300;
}

} // namespace detail

// exact preperiodicity test for a quadratic (or rational) algebraic point;
// degree > 2 is reported as undetermined by design
inline PreperiodicResult preperiodic_test(const RationalMap& f, const AlgebraicPoint& x,
                                          long budget = 64) {
    if (x.degree == 1) {
        mpz_class num = -x.min_poly.coeff(0), den = x.min_poly.coeff(1);
        return preperiodic_test(f, ProjPoint(num, den), budget);
    }
    PreperiodicResult out;
    out.comparison_bound = height_comparison_bound(f);
    if (x.degree != 2) return out; // undetermined by design
    mpz_class c2 = x.min_poly.coeff(2), c1 = x.min_poly.coeff(1), c0 = x.min_poly.coeff(0);
    mpz_class disc = c1 * c1 - 4 * c2 * c0;
    if (disc == 0 || mpz_perfect_square_p(disc.get_mpz_t()))
        throw InputError("preperiodic_test: quadratic polynomial is reducible");
    auto [D0, sq] = squarefree_split(disc);
    QuadNum z(mpq_class(-c1, 2 * c2), mpq_class(sq, 2 * c2), D0);
    z.u.canonicalize();
    z.v.canonicalize();

    detail::QuadOrbitPoint pt;
    pt.z = z;
    std::map<std::string, long> seen;
    std::vector<detail::QuadOrbitPoint> orbit{pt};
    seen[pt.key()] = 0;
    auto [num, den] = f.as_rational_function();
    for (long k = 0; k <= budget; ++k) {
        double h = pt.inf ? 0.0 : detail::quad_naive_height_lower(*pt.z);
        if (h > out.comparison_bound) {
            out.status = PreperiodicStatus::Wandering;
            out.witness_step = k;
            out.witness_height = h;
            return out;
        }
        if (pt.inf) {
            mpz_class gtop = f.G.c[f.d];
            detail::QuadOrbitPoint nxt;
            if (gtop == 0)
                nxt.inf = true;
            else
                nxt.z = QuadNum(mpq_class(f.F.c[f.d], gtop), 0, D0);
            if (!nxt.inf) nxt.z->u.canonicalize();
            pt = nxt;
        } else {
            pt = detail::quad_step(num, den, *pt.z);
        }
        auto it = seen.find(pt.key());
        if (it != seen.end()) {
            out.status = PreperiodicStatus::Preperiodic;
            out.tail = it->second;
            for (size_t j = size_t(it->second); j < orbit.size(); ++j) {
                if (!orbit[j].inf) out.quad_cycle.push_back(*orbit[j].z);
                out.cycle_repr.push_back(orbit[j].repr());
            }
            return out;
        }
        seen[pt.key()] = long(orbit.size());
        orbit.push_back(pt);
    }
    out.status = PreperiodicStatus::Undetermined;
    return out;
}

// --- small points ------------------------------------------------------

struct SmallPointsResult {
    std::vector<ProjPoint> points;
    std::vector<bool> preperiodic;
    std::vector<double> heights;     // 0 for exactly-certified preperiodic points
    double essential_minimum = 0;    // least height among non-preperiodic points
    double tol = 1e-10;
};

// all rational points with canonical height <= bound (up to tol slack),
// searched through naive height <= bound + C(f)
inline SmallPointsResult small_points_enumerate(const RationalMap& f, double bound) {
    if (bound < 0) throw InputError("small_points_enumerate: bound must be >= 0");
    SmallPointsResult out;
    const double tol = out.tol;
    double C = height_comparison_bound(f);
    double limit = std::exp(bound + C) * (1 + 1e-12);
    if (limit > 2e5) throw InputError("small_points_enumerate: search space too large");
    long S = long(std::floor(limit));

    std::optional<double> essmin;
    auto consider = [&](const ProjPoint& x) {
        PreperiodicResult pp = preperiodic_test(f, x, 64);
        if (pp.status == PreperiodicStatus::Preperiodic) {
            out.points.push_back(x);
            out.preperiodic.push_back(true);
            out.heights.push_back(0.0);
            return;
        }
        HeightResult hr = canonical_height(f, x, tol / 2, HeightMethod::LocalSum);
        double v = hr.value.to_double();
        if (v <= bound + 1.5 * tol) {
            out.points.push_back(x);
            out.preperiodic.push_back(false);
            out.heights.push_back(v);
            if (!essmin || v < *essmin) essmin = v;
        }
    };

    // scale by scale; within a scale numerator ascending, then denominator
    for (long s = 1; s <= S; ++s) {
        std::vector<std::pair<long, long>> batch;
        for (long a = -s; a <= s; ++a) {
            for (long b = (std::labs(a) == s) ? 0 : s; b <= s; ++b) {
                if (b == 0 && (a != 1 || s != 1)) continue; // (1:0) is the only b=0 point
                if (b == 0 && a == 1 && s == 1) {
                    batch.emplace_back(a, b);
                    continue;
                }
                if (std::max(std::labs(a), b) != s) continue;
                if (mpz_class(gcd(mpz_class(a), mpz_class(b))) != 1) continue;
                batch.emplace_back(a, b);
            }
        }
        std::sort(batch.begin(), batch.end());
        for (auto [a, b] : batch) consider(ProjPoint(mpz_class(a), mpz_class(b)));
    }
    out.essential_minimum = essmin.value_or(0.0);
    return out;
}

} // namespace adelheight
