#pragma once

// One-parameter families f_t of degree-d self-maps of P^1, cut out by a pair
// of binary forms whose coefficients are integer polynomials in t. Fibers are
// obtained by exact evaluation; degeneracy is decided by the precomputed
// resultant polynomial Res(t), never by numerical thresholds. On top of the
// fibers: per-parameter canonical-height profiles for a section, and
// empirical height-inequality scans h_hat >= eps*h(t) - c over a sample.

#include <gmpxx.h>

#include <algorithm>
#include <utility>
#include <vector>

#include "adelheight/binform.hpp"
#include "adelheight/dynmap.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/globalheight.hpp"
#include "adelheight/intpoly.hpp"

namespace adelheight {

namespace detail {

// exact Lagrange interpolation through (ts[i], vs[i]); the result must lie in
// Z[t] (it is used for determinants of integer-polynomial matrices)
inline IntPoly interpolate_integer(const std::vector<mpz_class>& ts, const std::vector<mpz_class>& vs) {
    size_t n = ts.size();
    std::vector<mpq_class> acc(n, mpq_class(0));
    for (size_t i = 0; i < n; ++i) {
        if (vs[i] == 0) continue;
        std::vector<mpz_class> basis{mpz_class(1)}; // prod_{j != i} (x - t_j), ascending
        mpz_class den = 1;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            basis.push_back(0);
            for (size_t k = basis.size() - 1; k >= 1; --k) basis[k] = basis[k - 1] - ts[j] * basis[k];
            basis[0] = -ts[j] * basis[0];
            den *= ts[i] - ts[j];
        }
        for (size_t k = 0; k < basis.size(); ++k)
            acc[k] += mpq_class(vs[i] * basis[k]) / mpq_class(den);
    }
    std::vector<mpz_class> out(n);
    for (size_t k = 0; k < n; ++k) {
        if (acc[k].get_den() != 1) throw NumericError("interpolate_integer: non-integral coefficient");
        out[k] = acc[k].get_num();
    }
    return IntPoly(std::move(out));
}

inline BinForm eval_form_z(const std::vector<IntPoly>& side, long d, const mpz_class& t) {
    std::vector<mpz_class> v(side.size());
    for (size_t j = 0; j < side.size(); ++j) v[j] = side[j].eval_z(t);
    return BinForm(d, std::move(v));
}

} // namespace detail

struct ParamFamily {
    long d = 2;
    std::vector<IntPoly> F, G; // F[j], G[j] multiply X^j Y^(d-j), matching BinForm layout
    IntPoly res_t;             // resultant of the fiber forms, as a polynomial in t

    // coefficient vectors of equal length d+1 >= 3; computes Res(t) by
    // evaluation/interpolation and rejects families whose generic fiber is
    // not a morphism
    static ParamFamily from_forms(std::vector<IntPoly> f, std::vector<IntPoly> g) {
        if (f.size() != g.size() || f.size() < 3)
            throw InputError("ParamFamily: need coefficient vectors of equal length >= 3");
        ParamFamily fam;
        fam.d = static_cast<long>(f.size()) - 1;
        fam.F = std::move(f);
        fam.G = std::move(g);
        long m = 0;
        for (const auto& p : fam.F) m = std::max(m, p.deg());
        for (const auto& p : fam.G) m = std::max(m, p.deg());
        long n = 2 * fam.d * std::max(m, 0L) + 1; // deg_t Res <= 2d * max coefficient degree
        std::vector<mpz_class> ts(n), vs(n);
        for (long i = 0; i < n; ++i) {
            mpz_class t = (i % 2 == 1) ? mpz_class((i + 1) / 2) : mpz_class(-(i / 2));
            ts[i] = t;
            vs[i] = resultant(detail::eval_form_z(fam.F, fam.d, t), detail::eval_form_z(fam.G, fam.d, t));
        }
        fam.res_t = detail::interpolate_integer(ts, vs);
        if (fam.res_t.is_zero()) throw InputError("ParamFamily: resultant vanishes identically");
        return fam;
    }

    bool degenerate_at(const mpq_class& t0) const { return res_t.eval_q(t0) == 0; }
};

// normalized primitive lift of the fiber map at t0
inline RationalMap specialize(const ParamFamily& fam, const mpq_class& t0) {
    if (fam.degenerate_at(t0)) throw InputError("specialize: degenerate fiber (resultant vanishes at t)");
    std::vector<mpq_class> fq(fam.d + 1), gq(fam.d + 1);
    mpz_class lam = 1;
    for (long j = 0; j <= fam.d; ++j) {
        fq[j] = fam.F[j].eval_q(t0);
        gq[j] = fam.G[j].eval_q(t0);
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), fq[j].get_den().get_mpz_t());
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), gq[j].get_den().get_mpz_t());
    }
    std::vector<mpz_class> fz(fam.d + 1), gz(fam.d + 1);
    for (long j = 0; j <= fam.d; ++j) {
        fz[j] = mpz_class(fq[j].get_num() * (lam / fq[j].get_den()));
        gz[j] = mpz_class(gq[j].get_num() * (lam / gq[j].get_den()));
    }
    return RationalMap::from_forms(BinForm(fam.d, std::move(fz)), BinForm(fam.d, std::move(gz)));
}

struct Section {
    IntPoly num, den; // coprime, jointly primitive; value at t is (num(t) : den(t))

    // strips the common polynomial factor and joint content, so the section
    // extends over the whole base
    static Section from_polys(IntPoly p, IntPoly q) {
        if (p.is_zero() && q.is_zero()) throw InputError("Section: zero section");
        if (!p.is_zero() && !q.is_zero()) {
            IntPoly g = gcd(p, q);
            if (g.deg() > 0) {
                p = divexact_q(p, g);
                q = divexact_q(q, g);
            }
        }
        mpz_class c;
        mpz_gcd(c.get_mpz_t(), p.content().get_mpz_t(), q.content().get_mpz_t());
        if (c > 1) {
            if (!p.is_zero()) p = divexact(p, IntPoly::constant(c));
            if (!q.is_zero()) q = divexact(q, IntPoly::constant(c));
        }
        int sign = q.is_zero() ? sgn(p.lead()) : sgn(q.lead());
        if (sign < 0) {
            p = -p;
            q = -q;
        }
        Section s;
        s.num = std::move(p);
        s.den = std::move(q);
        return s;
    }
    static Section constant(const mpq_class& x) {
        return from_polys(IntPoly::constant(x.get_num()), IntPoly::constant(x.get_den()));
    }

    ProjPoint at(const mpq_class& t0) const {
        mpq_class u = num.eval_q(t0), v = den.eval_q(t0);
        mpz_class lam;
        mpz_lcm(lam.get_mpz_t(), u.get_den().get_mpz_t(), v.get_den().get_mpz_t());
        return ProjPoint(mpz_class(u.get_num() * (lam / u.get_den())),
                         mpz_class(v.get_num() * (lam / v.get_den())));
    }
};

// the section t -> f_t(s(t)), computed symbolically; satisfies
// image_section(fam, s).at(t0) == specialize(fam, t0).apply(s.at(t0))
inline Section image_section(const ParamFamily& fam, const Section& s) {
    std::vector<IntPoly> pn(fam.d + 1), pd(fam.d + 1); // num^j, den^(d-j)
    pn[0] = IntPoly::constant(1);
    pd[0] = IntPoly::constant(1);
    for (long j = 1; j <= fam.d; ++j) {
        pn[j] = pn[j - 1] * s.num;
        pd[j] = pd[j - 1] * s.den;
    }
    IntPoly P, Q;
    for (long j = 0; j <= fam.d; ++j) {
        IntPoly mono = pn[j] * pd[fam.d - j];
        P = P + fam.F[j] * mono;
        Q = Q + fam.G[j] * mono;
    }
    return Section::from_polys(P, Q);
}

struct ProfileRow {
    mpq_class t;
    bool degenerate = false; // fiber map undefined; height fields meaningless
    double param_height = 0; // log max(|num t|, |den t|)
    BigFloat hhat;
    double error_bound = 0;
    bool flagged = false; // hhat <= tol: candidate preperiodic specialization
};

struct SpecializationProfile {
    std::vector<ProfileRow> rows;
    double tol = 0;
};

inline SpecializationProfile specialization_profile(const ParamFamily& fam, const Section& sec,
                                                    const std::vector<mpq_class>& ts, double tol) {
    if (!(tol > 0)) throw InputError("specialization_profile: tolerance must be positive");
    SpecializationProfile out;
    out.tol = tol;
    out.rows.reserve(ts.size());
    for (const auto& t0 : ts) {
        ProfileRow row;
        row.t = t0;
        row.param_height = naive_height(ProjPoint::from_rational(t0)).to_double();
        if (fam.degenerate_at(t0)) {
            row.degenerate = true;
        } else {
            HeightResult h = canonical_height(specialize(fam, t0), sec.at(t0), tol);
            row.hhat = h.value;
            row.error_bound = h.error_bound;
            row.flagged = h.value.to_double() <= tol;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

struct ScanReport {
    SpecializationProfile profile;
    bool eps_defined = false; // false when every sampled fiber was flagged or degenerate
    double eps_hat = 0;       // inf over unflagged rows of hhat / max(h(t), 1)
    double c_hat = 0;         // least c with hhat >= eps_hat * h(t) - c on the sample
    std::vector<mpq_class> violating_t;
};

// empirical constants for hhat >= eps*h(t) - c over the sampled parameters;
// says nothing beyond the sample
inline ScanReport height_inequality_scan(const ParamFamily& fam, const Section& sec,
                                         const std::vector<mpq_class>& ts, double tol) {
    ScanReport rep;
    rep.profile = specialization_profile(fam, sec, ts, tol);
    for (const auto& row : rep.profile.rows) {
        if (row.degenerate || row.flagged) continue;
        double ratio = row.hhat.to_double() / std::max(row.param_height, 1.0);
        if (!rep.eps_defined || ratio < rep.eps_hat) rep.eps_hat = ratio;
        rep.eps_defined = true;
    }
    if (!rep.eps_defined) return rep;
    for (const auto& row : rep.profile.rows) {
        if (row.degenerate) continue;
        rep.c_hat = std::max(rep.c_hat, rep.eps_hat * row.param_height - row.hhat.to_double());
    }
    for (const auto& row : rep.profile.rows) {
        if (row.degenerate) continue;
        if (row.hhat.to_double() < rep.eps_hat * row.param_height - rep.c_hat - 1e-12)
            rep.violating_t.push_back(row.t);
    }
    return rep;
}

} // namespace adelheight
