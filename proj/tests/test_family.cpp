#include "doctest.h"

#include <cmath>
#include <vector>

#include "adelheight/family.hpp"
#include "adelheight/rng.hpp"

using namespace adelheight;

namespace {

IntPoly ip(std::vector<long> v) {
    std::vector<mpz_class> c(v.begin(), v.end());
    return IntPoly(std::move(c));
}

mpq_class q(long n, long d = 1) {
    mpq_class x(n, d);
    x.canonicalize();
    return x;
}

// x^2 + t as a pair of forms: (X^2 + t Y^2, Y^2)
ParamFamily quad_plus_t() {
    return ParamFamily::from_forms({IntPoly::monomial(1, 1), ip({}), ip({1})},
                                   {ip({1}), ip({}), ip({})});
}

// (X^2 - t Y^2, X Y): fiber x -> x - t/x, degenerate exactly at t = 0
ParamFamily lattes_like() {
    return ParamFamily::from_forms({-IntPoly::monomial(1, 1), ip({}), ip({1})},
                                   {ip({}), ip({1}), ip({})});
}

} // namespace

TEST_CASE("fiber maps at sample parameters") {
    ParamFamily fam = quad_plus_t();
    CHECK(fam.res_t == IntPoly::constant(1)); // x^2+t never degenerates

    RationalMap f1 = specialize(fam, q(-1));
    CHECK(f1.F == BinForm(2, {-1, 0, 1}));
    CHECK(f1.G == BinForm(2, {1, 0, 0}));

    RationalMap fh = specialize(fam, q(1, 2));
    CHECK(fh.F == BinForm(2, {1, 0, 2})); // 2X^2 + Y^2
    CHECK(fh.G == BinForm(2, {2, 0, 0})); // 2Y^2
    CHECK(fh.res == 16);
    CHECK(fh.bad_primes.size() == 1);
    CHECK(fh.bad_primes.count(2) == 1);

    // t*x^2 + 1 collapses at t = 0
    ParamFamily tx = ParamFamily::from_forms({ip({1}), ip({}), IntPoly::monomial(1, 1)},
                                             {ip({1}), ip({}), ip({})});
    CHECK(tx.res_t == ip({0, 0, 1})); // t^2
    CHECK(tx.degenerate_at(q(0)));
    CHECK_THROWS_AS(specialize(tx, q(0)), InputError);
    RationalMap g = specialize(tx, q(1));
    CHECK(g.F == BinForm(2, {1, 0, 1}));

    ParamFamily ll = lattes_like();
    CHECK(ll.res_t.deg() == 1);
    CHECK(ll.res_t.coeff(0) == 0); // +-t
    CHECK_THROWS_AS(specialize(ll, q(0)), InputError);

    // generic fiber must be a morphism
    CHECK_THROWS_AS(ParamFamily::from_forms({ip({}), ip({}), ip({1})}, {ip({}), ip({}), ip({1})}),
                    InputError);
    CHECK_THROWS_AS(ParamFamily::from_forms({ip({1}), ip({1})}, {ip({1}), ip({1})}), InputError);
}

TEST_CASE("resultant polynomial matches direct fiber resultants") {
    SplitMix64 rng(2026);
    auto rnd_poly = [&](long maxdeg) {
        std::vector<mpz_class> c(rng.next_below(maxdeg + 1) + 1);
        for (auto& x : c) x = static_cast<long>(rng.next_below(7)) - 3;
        return IntPoly(std::move(c));
    };
    int built = 0;
    while (built < 10) {
        long d = 2 + static_cast<long>(rng.next_below(2));
        std::vector<IntPoly> f(d + 1), g(d + 1);
        for (auto& p : f) p = rnd_poly(2);
        for (auto& p : g) p = rnd_poly(2);
        ParamFamily fam;
        try {
            fam = ParamFamily::from_forms(f, g);
        } catch (const InputError&) {
            continue;
        }
        ++built;
        for (long t = -3; t <= 3; ++t) {
            mpz_class tz(t);
            BinForm Ft = detail::eval_form_z(fam.F, fam.d, tz);
            BinForm Gt = detail::eval_form_z(fam.G, fam.d, tz);
            CHECK(fam.res_t.eval_z(tz) == resultant(Ft, Gt));
            if (fam.res_t.eval_z(tz) == 0) continue;
            // combined-content-free fibers specialize with the same resultant
            mpz_class c = 0;
            for (const auto& x : Ft.c) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
            for (const auto& x : Gt.c) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
            if (c == 1) CHECK(specialize(fam, mpq_class(tz)).res == resultant(Ft, Gt));
        }
    }
}

TEST_CASE("sections normalize and evaluate") {
    Section zero = Section::constant(q(0));
    CHECK(zero.num.is_zero());
    CHECK(zero.den == ip({1}));
    CHECK(zero.at(q(5)) == ProjPoint(0, 1));

    Section s = Section::from_polys(ip({-1, 0, 1}), ip({-1, 1})); // (t^2-1)/(t-1) -> t+1
    CHECK(s.num == ip({1, 1}));
    CHECK(s.den == ip({1}));
    CHECK(s.at(q(1)) == ProjPoint(2, 1));

    Section t_half = Section::from_polys(ip({0, 2}), ip({4})); // 2t/4 -> t/2
    CHECK(t_half.num == ip({0, 1}));
    CHECK(t_half.den == ip({2}));
    CHECK(t_half.at(q(1, 2)) == ProjPoint(1, 4));

    Section neg = Section::from_polys(ip({0, 1}), ip({-1})); // sign moves to the numerator
    CHECK(neg.den == ip({1}));
    CHECK(neg.at(q(3)) == ProjPoint(-3, 1));

    Section inf = Section::from_polys(ip({1}), ip({}));
    CHECK(inf.at(q(7)) == ProjPoint::infinity());

    CHECK_THROWS_AS(Section::from_polys(ip({}), ip({})), InputError);
}

TEST_CASE("symbolic image commutes with specialization") {
    ParamFamily fam = quad_plus_t();
    Section s0 = Section::constant(q(0));
    Section img = image_section(fam, s0);
    CHECK(img.num == IntPoly::monomial(1, 1));
    CHECK(img.den == ip({1}));

    SplitMix64 rng(77);
    auto rnd_poly = [&](long maxdeg) {
        std::vector<mpz_class> c(rng.next_below(maxdeg + 1) + 1);
        for (auto& x : c) x = static_cast<long>(rng.next_below(7)) - 3;
        return IntPoly(std::move(c));
    };
    std::vector<mpq_class> samples = {q(0), q(1), q(-2), q(1, 2), q(-2, 3), q(5)};
    int done = 0;
    while (done < 8) {
        long d = 2 + static_cast<long>(rng.next_below(2));
        std::vector<IntPoly> f(d + 1), g(d + 1);
        for (auto& p : f) p = rnd_poly(2);
        for (auto& p : g) p = rnd_poly(2);
        IntPoly sn = rnd_poly(2), sd = rnd_poly(2);
        if (sn.is_zero() && sd.is_zero()) continue;
        ParamFamily fam2;
        try {
            fam2 = ParamFamily::from_forms(f, g);
        } catch (const InputError&) {
            continue;
        }
        ++done;
        Section sec = Section::from_polys(sn, sd);
        Section img2 = image_section(fam2, sec);
        for (const auto& t0 : samples) {
            if (fam2.degenerate_at(t0)) continue;
            CHECK(img2.at(t0) == specialize(fam2, t0).apply(sec.at(t0)));
        }
    }
}

TEST_CASE("specialization profile flags preperiodic fibers") {
    ParamFamily fam = quad_plus_t();
    Section s0 = Section::constant(q(0));
    SpecializationProfile prof =
        specialization_profile(fam, s0, {q(-2), q(-1), q(0), q(100)}, 1e-9);
    REQUIRE(prof.rows.size() == 4);
    CHECK(prof.rows[0].flagged);
    CHECK(prof.rows[1].flagged);
    CHECK(prof.rows[2].flagged);
    CHECK(!prof.rows[3].flagged);
    for (const auto& row : prof.rows) {
        CHECK(!row.degenerate);
        CHECK(row.error_bound <= 1e-9);
    }
    CHECK(prof.rows[3].hhat.to_double() == doctest::Approx(0.5 * std::log(100.0)).epsilon(0.01));
    CHECK(prof.rows[3].param_height == doctest::Approx(std::log(100.0)));

    SpecializationProfile dg = specialization_profile(lattes_like(), Section::constant(q(1)),
                                                      {q(0), q(1)}, 1e-9);
    CHECK(dg.rows[0].degenerate);
    CHECK(!dg.rows[1].degenerate);
    CHECK(dg.rows[1].flagged); // 1 -> 0 -> infinity, fixed

    CHECK_THROWS_AS(specialization_profile(fam, s0, {q(1)}, 0.0), InputError);
}

TEST_CASE("flagged set equals certified preperiodic set on the quarter-integer window") {
    ParamFamily fam = quad_plus_t();
    Section s0 = Section::constant(q(0));
    std::vector<mpq_class> ts;
    for (long k = -8; k <= 8; ++k) ts.push_back(q(k, 4));
    SpecializationProfile prof = specialization_profile(fam, s0, ts, 1e-9);
    REQUIRE(prof.rows.size() == ts.size());
    int flagged = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        PreperiodicResult pre = preperiodic_test(specialize(fam, ts[i]), s0.at(ts[i]));
        REQUIRE(pre.status != PreperiodicStatus::Undetermined);
        CHECK(prof.rows[i].flagged == (pre.status == PreperiodicStatus::Preperiodic));
        if (prof.rows[i].flagged) ++flagged;
    }
    CHECK(flagged == 3); // t = -2, -1, 0
}

TEST_CASE("profile heights satisfy the functional equation fiberwise") {
    ParamFamily fam = quad_plus_t();
    for (const auto& t0 : {q(3), q(-5, 2)}) {
        RationalMap f = specialize(fam, t0);
        ProjPoint x(2, 3);
        double hx = canonical_height(f, x, 1e-9).value.to_double();
        double hfx = canonical_height(f, f.apply(x), 1e-9).value.to_double();
        CHECK(hfx == doctest::Approx(2 * hx).epsilon(1e-7));
    }
}

TEST_CASE("height inequality scan") {
    ParamFamily fam = quad_plus_t();
    Section s0 = Section::constant(q(0));

    std::vector<mpq_class> ts;
    for (long t = 10; t <= 60; ++t) ts.push_back(q(t));
    ScanReport rep = height_inequality_scan(fam, s0, ts, 1e-8);
    CHECK(rep.eps_defined);
    CHECK(rep.eps_hat >= 0.4);
    CHECK(rep.c_hat <= 1.0);
    CHECK(rep.violating_t.empty());
    for (const auto& row : rep.profile.rows) {
        CHECK(!row.flagged);
        CHECK(row.hhat.to_double() >= 0.4 * row.param_height - 1.0);
        CHECK(row.hhat.to_double() >= rep.eps_hat * row.param_height - rep.c_hat - 1e-12);
    }

    ScanReport all_flagged = height_inequality_scan(fam, s0, {q(-1), q(-2)}, 1e-8);
    CHECK(!all_flagged.eps_defined);
    for (const auto& row : all_flagged.profile.rows) CHECK(row.flagged);

    // constant family x^2 with section 2: every fiber height is log 2
    ParamFamily cst = ParamFamily::from_forms({ip({}), ip({}), ip({1})}, {ip({1}), ip({}), ip({})});
    CHECK(cst.res_t == IntPoly::constant(1));
    ScanReport crep = height_inequality_scan(cst, Section::constant(q(2)), {q(1), q(10), q(100)}, 1e-10);
    CHECK(crep.eps_defined);
    for (const auto& row : crep.profile.rows)
        CHECK(row.hhat.to_double() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(crep.c_hat <= 1e-9);
    CHECK(crep.violating_t.empty());
}
