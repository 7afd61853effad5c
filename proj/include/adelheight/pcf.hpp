#pragma once
// Postcritical analysis: canonical height of the critical divisor, and exact
// preperiodicity certificates for each critical point. A map is PCF iff every
// critical point is preperiodic, iff the critical height vanishes.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "adelheight/binform.hpp"
#include "adelheight/dynmap.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/globalheight.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

namespace detail {

inline std::vector<mpz_class> positive_divisors(const mpz_class& n) {
    std::vector<mpz_class> out{1};
    for (const auto& [p, e] : factor_integer(n)) {
        size_t base = out.size();
        mpz_class pk = 1;
        for (unsigned long k = 1; k <= e; ++k) {
            pk *= p;
            for (size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
    return out;
}

// splits off every rational root of a squarefree polynomial; returns the
// roots and the rootless cofactor
inline std::pair<std::vector<mpq_class>, IntPoly> strip_rational_roots(IntPoly p) {
    std::vector<mpq_class> roots;
    while (p.deg() >= 1 && p.coeff(0) == 0) {
        roots.emplace_back(0);
        p = divexact_q(p, IntPoly::monomial(1, 1));
    }
    bool progress = true;
    while (p.deg() >= 1 && progress) {
        progress = false;
        mpz_class c0 = abs(p.coeff(0)), lead = abs(p.lead());
        for (const mpz_class& a : positive_divisors(c0)) {
            for (const mpz_class& b : positive_divisors(lead)) {
                if (gcd(a, b) != 1) continue;
                for (int sign : {1, -1}) {
                    mpq_class cand(sign * a, b);
                    cand.canonicalize();
                    if (p.eval_q(cand) != 0) continue;
                    roots.push_back(cand);
                    p = divexact_q(p, IntPoly({mpz_class(-sign * a), b}));
                    progress = true;
                    break;
                }
                if (progress) break;
            }
            if (progress) break;
        }
    }
    std::sort(roots.begin(), roots.end());
    return {roots, p};
}

inline std::string poly_str(const IntPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (long k = p.deg(); k >= 0; --k) {
        mpz_class c = p.coeff(k);
        if (c == 0) continue;
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        mpz_class m = abs(c);
        if (m != 1 || k == 0) out += m.get_str();
        if (k >= 1) {
            if (m != 1) out += "*";
            out += "x";
            if (k >= 2) out += "^" + std::to_string(k);
        }
    }
    return out;
}

} // namespace detail

enum class PcfStatus { PCF, NotPCF, Undetermined };

// one entry per Galois orbit of critical points (a rational point, or the
// full root set of an irreducible-over-Q factor of the critical divisor)
struct CriticalPointEvidence {
    std::string point;          // "a/b", "infinity", or "root of <polynomial>"
    long degree = 1;            // number of conjugate points in the orbit
    unsigned multiplicity = 1;  // ramification multiplicity in the Wronskian
    PreperiodicStatus status = PreperiodicStatus::Undetermined;
    long tail = 0;
    std::vector<std::string> cycle;
    long witness_step = -1;     // wandering: iterate whose height escapes
    double witness_height = 0;
    double comparison_bound = 0;
};

struct PcfCertificate {
    PcfStatus status = PcfStatus::Undetermined;
    std::vector<CriticalPointEvidence> critical_points;
};

// canonical height mass of the critical divisor: zero exactly for PCF maps,
// and otherwise the sum of the canonical heights of the 2d-2 critical points
inline HeightResult critical_height(const RationalMap& f, double tol) {
    return height_mass(f, critical_divisor(f).form, tol);
}

namespace detail {

inline CriticalPointEvidence orbit_evidence(const PreperiodicResult& r) {
    CriticalPointEvidence ev;
    ev.status = r.status;
    ev.tail = r.tail;
    ev.cycle = r.cycle_repr;
    ev.witness_step = r.witness_step;
    ev.witness_height = r.witness_height;
    ev.comparison_bound = r.comparison_bound;
    return ev;
}

} // namespace detail

// exact certificate: PCF iff every critical orbit is certified preperiodic,
// NotPCF iff some critical orbit carries an escape witness. Orbits of degree
// three or more that never leave the budget undetermined stay undetermined;
// the verdict is never guessed from floating point.
inline PcfCertificate is_pcf(const RationalMap& f, long budget = 64) {
    if (budget < 0) throw InputError("is_pcf: budget must be nonnegative");
    PcfCertificate cert;
    bool any_wandering = false, all_preperiodic = true;
    auto add = [&](CriticalPointEvidence ev) {
        if (ev.status == PreperiodicStatus::Wandering) any_wandering = true;
        if (ev.status != PreperiodicStatus::Preperiodic) all_preperiodic = false;
        cert.critical_points.push_back(std::move(ev));
    };

    for (const auto& [factor, mult] : critical_divisor(f).factors) {
        if (factor.d == 1) {
            // c1*X + c0*Y vanishes at (-c0 : c1)
            ProjPoint pt(-factor.c[0], factor.c[1]);
            auto ev = detail::orbit_evidence(preperiodic_test(f, pt, budget));
            ev.point = pt.str();
            ev.multiplicity = mult;
            add(std::move(ev));
            continue;
        }
        auto [roots, rest] = detail::strip_rational_roots(factor.dehomogenize());
        for (const mpq_class& r : roots) {
            ProjPoint pt = ProjPoint::from_rational(r);
            auto ev = detail::orbit_evidence(preperiodic_test(f, pt, budget));
            ev.point = pt.str();
            ev.multiplicity = mult;
            add(std::move(ev));
        }
        if (rest.deg() >= 1) {
            CriticalPointEvidence ev;
            if (rest.deg() == 2)
                ev = detail::orbit_evidence(
                    preperiodic_test(f, AlgebraicPoint::from_poly(rest), budget));
            else
                ev.comparison_bound = height_comparison_bound(f);
            ev.point = "root of " + detail::poly_str(rest);
            ev.degree = rest.deg();
            ev.multiplicity = mult;
            add(std::move(ev));
        }
    }

    cert.status = any_wandering      ? PcfStatus::NotPCF
                  : all_preperiodic  ? PcfStatus::PCF
                                     : PcfStatus::Undetermined;
    return cert;
}

} // namespace adelheight
