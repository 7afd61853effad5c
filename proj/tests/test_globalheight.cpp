#include "doctest.h"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "adelheight/globalheight.hpp"
#include "adelheight/rng.hpp"

using namespace adelheight;

namespace {

IntPoly poly(std::vector<long> coeffs) {
    std::vector<mpz_class> v(coeffs.begin(), coeffs.end());
    return IntPoly(std::move(v));
}

BinForm form(long d, std::vector<long> coeffs) {
    std::vector<mpz_class> v(coeffs.begin(), coeffs.end());
    return BinForm(d, std::move(v));
}

RationalMap random_map(SplitMix64& rng, long dmax = 3, long height = 10) {
    for (;;) {
        long d = 2 + static_cast<long>(rng.next_below(dmax - 1));
        std::vector<mpz_class> fc(d + 1), gc(d + 1);
        for (auto& x : fc) x = static_cast<long>(rng.next_below(2 * height + 1)) - height;
        for (auto& x : gc) x = static_cast<long>(rng.next_below(2 * height + 1)) - height;
        try {
            return RationalMap::from_forms(BinForm(d, std::move(fc)), BinForm(d, std::move(gc)));
        } catch (const InputError&) {
            continue;
        }
    }
}

ProjPoint random_point(SplitMix64& rng, long height = 20) {
    mpz_class a = static_cast<long>(rng.next_below(2 * height + 1)) - height;
    mpz_class b = static_cast<long>(rng.next_below(height + 1));
    if (a == 0 && b == 0) b = 1;
    return ProjPoint(a, b);
}

double val(const HeightResult& h) { return h.value.to_double(); }

// point (a:b) as the root divisor of a linear form
BinForm point_form(const ProjPoint& x) {
    return BinForm(1, {mpz_class(-x.a), mpz_class(x.b)});
}

const double LOG2 = std::log(2.0);
const double LOG3 = std::log(3.0);
const double LOG5 = std::log(5.0);

} // namespace

TEST_CASE("naive height of rational points") {
    CHECK(naive_height(ProjPoint::from_rational(mpq_class(0))).to_double() == 0.0);
    CHECK(naive_height(ProjPoint::infinity()).to_double() == 0.0);
    CHECK(std::fabs(naive_height(ProjPoint::from_rational(mpq_class(2, 3))).to_double() - LOG3) <
          1e-60);
    CHECK(std::fabs(naive_height(ProjPoint(mpz_class(-7), mpz_class(2))).to_double() -
                    std::log(7.0)) < 1e-14);
    LogReal ex = naive_height_exact(ProjPoint::from_rational(mpq_class(2, 3)));
    CHECK((ex - LogReal::log_prime(mpz_class(3))).is_formal_zero());
}

TEST_CASE("naive height of algebraic points") {
    AlgebraicPoint golden = AlgebraicPoint::from_poly(poly({-1, -1, 1}));
    CHECK(golden.degree == 2);
    CHECK(golden.conjugates.size() == 2);
    auto [h, err] = naive_height(golden);
    double phi = (1 + std::sqrt(5.0)) / 2;
    CHECK(std::fabs(h.to_double() - 0.5 * std::log(phi)) < 1e-12);
    CHECK(err < 1e-30);

    // roots on the unit circle: height zero, lead 1
    auto [h2, err2] = naive_height(AlgebraicPoint::from_poly(poly({1, 0, 1})));
    CHECK(std::fabs(h2.to_double()) < 1e-30);
    CHECK(err2 < 1e-30);

    // 3x - 2: height of 2/3 through the algebraic route
    auto [h3, e3] = naive_height(AlgebraicPoint::from_poly(poly({-2, 3})));
    CHECK(std::fabs(h3.to_double() - LOG3) < 1e-12);
    CHECK(e3 < 1e-30);

    CHECK_THROWS_AS(AlgebraicPoint::from_poly(poly({7})), InputError);
    CHECK_THROWS_AS(AlgebraicPoint::from_poly(poly({1, 2, 1})), InputError); // (x+1)^2
}

TEST_CASE("height comparison bound C(f)") {
    CHECK(height_comparison_bound(build_map(poly({0, 0, 1}), poly({1}))) < 1e-8);
    CHECK(std::fabs(height_comparison_bound(build_map(poly({-2, 0, 1}), poly({1}))) - LOG3) <
          1e-6);
    CHECK(std::fabs(height_comparison_bound(build_map(poly({1, 0, 1}), poly({1}))) - LOG2) <
          1e-6);
}

TEST_CASE("canonical height: exact power map values") {
    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    for (HeightMethod m : {HeightMethod::LocalSum, HeightMethod::TateLimit}) {
        HeightResult h = canonical_height(sq, ProjPoint::from_rational(mpq_class(3, 5)), 1e-10, m);
        CHECK(h.error_bound == 0.0);
        REQUIRE(h.exact.has_value());
        CHECK((*h.exact - LogReal::log_prime(mpz_class(5))).is_formal_zero());
        CHECK(std::fabs(val(h) - LOG5) < 1e-60);
    }
    // breakdown of the local sum carries the whole value at the arch place
    HeightResult h = canonical_height(sq, ProjPoint::from_rational(mpq_class(3, 5)), 1e-10);
    REQUIRE(h.breakdown.size() == 1);
    CHECK(h.breakdown[0].place.archimedean);
    CHECK(h.method == "local-sum");
}

TEST_CASE("canonical height: x^2 - 2 against the z + 1/z semiconjugacy") {
    RationalMap f = build_map(poly({-2, 0, 1}), poly({1}));
    // pi(z) = z + 1/z sends z^2 to f(pi(z)), so hhat_f(z + 1/z) = 2 log max(|num|, |den|)
    struct Case {
        mpq_class z;
        double expect;
    };
    for (const Case& c : {Case{mpq_class(2), 2 * LOG2}, Case{mpq_class(3), 2 * LOG3},
                          Case{mpq_class(5, 2), 2 * LOG5}, Case{mpq_class(-7, 3), 2 * std::log(7.0)}}) {
        mpq_class x = c.z + 1 / c.z;
        for (HeightMethod m : {HeightMethod::LocalSum, HeightMethod::TateLimit}) {
            HeightResult h = canonical_height(f, ProjPoint::from_rational(x), 1e-10, m);
            CHECK(h.error_bound <= 1e-10);
            CHECK(std::fabs(val(h) - c.expect) < 1e-10 + h.error_bound);
        }
    }
    // 5/2 is the image of z = 2: the worked value 2 log 2
    HeightResult h = canonical_height(f, ProjPoint::from_rational(mpq_class(5, 2)), 1e-12);
    CHECK(std::fabs(val(h) - 2 * LOG2) < 2e-12);
}

TEST_CASE("canonical height: preperiodic points evaluate to zero") {
    RationalMap f1 = build_map(poly({-1, 0, 1}), poly({1})); // x^2 - 1
    HeightResult h = canonical_height(f1, ProjPoint::from_rational(mpq_class(0)), 1e-11);
    CHECK(std::fabs(val(h)) <= 1e-11);
    h = canonical_height(f1, ProjPoint::from_rational(mpq_class(0)), 1e-11,
                         HeightMethod::TateLimit);
    CHECK(std::fabs(val(h)) <= 1e-11);

    // fixed point 1/2 of 2x^2, with a content strip at every step
    RationalMap f2 = build_map(poly({0, 0, 2}), poly({1}));
    for (HeightMethod m : {HeightMethod::LocalSum, HeightMethod::TateLimit}) {
        HeightResult g = canonical_height(f2, ProjPoint::from_rational(mpq_class(1, 2)), 1e-10, m);
        CHECK(std::fabs(val(g)) <= 1e-10 + g.error_bound);
    }
}

TEST_CASE("canonical height: x^2/2 has exact value log 2 at x = 1") {
    // orbit 1 -> 1/2 -> 1/8 -> ...: naive heights (2^n - 1) log 2, so the
    // limit is exactly log 2
    RationalMap f = build_map(poly({0, 0, 1}), poly({2}));
    for (HeightMethod m : {HeightMethod::LocalSum, HeightMethod::TateLimit}) {
        HeightResult h = canonical_height(f, ProjPoint::from_rational(mpq_class(1)), 1e-11, m);
        CHECK(std::fabs(val(h) - LOG2) <= 1e-11 + h.error_bound);
    }
}

TEST_CASE("canonical height: functional equation and comparison bounds") {
    SplitMix64 rng(0xabcde1);
    for (int t = 0; t < 30; ++t) {
        RationalMap f = random_map(rng, 3, 8);
        ProjPoint x = random_point(rng, 12);
        double tol = 1e-9;
        HeightResult hx = canonical_height(f, x, tol);
        HeightResult hfx = canonical_height(f, f.apply(x), tol);
        CHECK(std::fabs(val(hfx) - f.d * val(hx)) <=
              (f.d + 1) * (hx.error_bound + hfx.error_bound + tol));
        // nonnegativity and |hhat - h| <= C(f)
        CHECK(val(hx) >= -hx.error_bound - 1e-15);
        double naive = naive_height(x).to_double();
        CHECK(std::fabs(val(hx) - naive) <= height_comparison_bound(f) + tol + 1e-12);
        // breakdown sums to the value
        double sum = 0;
        for (const auto& lv : hx.breakdown) sum += lv.value.to_double();
        CHECK(std::fabs(sum - val(hx)) <= hx.error_bound + 1e-12);
    }
}

TEST_CASE("canonical height: the two methods agree") {
    SplitMix64 rng(0x77aa);
    for (int t = 0; t < 25; ++t) {
        RationalMap f = random_map(rng, 3, 9);
        ProjPoint x = random_point(rng, 15);
        HeightResult a = canonical_height(f, x, 1e-9, HeightMethod::LocalSum);
        HeightResult b = canonical_height(f, x, 1e-9, HeightMethod::TateLimit);
        CHECK(b.method == "tate-limit");
        CHECK(std::fabs(val(a) - val(b)) <= a.error_bound + b.error_bound + 1e-15);
    }
}

TEST_CASE("canonical height: conjugation covariance") {
    SplitMix64 rng(0x5151);
    for (int t = 0; t < 10; ++t) {
        RationalMap f = random_map(rng, 2, 6);
        long b = long(rng.next_below(7)) - 3;
        long c = long(rng.next_below(7)) - 3;
        Moebius g(1, b, c, 1 + b * c); // unimodular
        RationalMap fg = conjugate(f, g);
        ProjPoint x = random_point(rng, 8);
        ProjPoint gx = g.apply(x);
        HeightResult h1 = canonical_height(f, x, 1e-9);
        HeightResult h2 = canonical_height(fg, gx, 1e-9);
        CHECK(std::fabs(val(h1) - val(h2)) <= 2e-9 + h1.error_bound + h2.error_bound);
    }
}

TEST_CASE("height mass agrees with rational canonical heights on linear forms") {
    SplitMix64 rng(0x909);
    for (int t = 0; t < 12; ++t) {
        RationalMap f = random_map(rng, 3, 7);
        ProjPoint x = random_point(rng, 9);
        HeightResult mass = height_mass(f, point_form(x), 1e-8);
        HeightResult href = canonical_height(f, x, 1e-9);
        CHECK(std::fabs(val(mass) - val(href)) <= mass.error_bound + href.error_bound + 1e-12);
    }
    // infinity through the mass route
    RationalMap f = build_map(poly({0, 0, 2}), poly({1}));
    HeightResult mass = height_mass(f, form(1, {1, 0}), 1e-9); // the form Y
    CHECK(std::fabs(val(mass)) <= 1e-9 + mass.error_bound);
}

TEST_CASE("height mass is additive over products of forms") {
    SplitMix64 rng(0x1b1b);
    for (int t = 0; t < 6; ++t) {
        RationalMap f = random_map(rng, 2, 5);
        BinForm m1 = point_form(random_point(rng, 6));
        BinForm m2 = point_form(random_point(rng, 6));
        HeightResult a = height_mass(f, m1, 1e-8);
        HeightResult b = height_mass(f, m2, 1e-8);
        HeightResult ab = height_mass(f, m1 * m2, 1e-8);
        CHECK(std::fabs(val(ab) - val(a) - val(b)) <=
              a.error_bound + b.error_bound + ab.error_bound + 1e-12);
    }
}

TEST_CASE("canonical height of algebraic points") {
    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    AlgebraicPoint golden = AlgebraicPoint::from_poly(poly({-1, -1, 1}));
    double phi = (1 + std::sqrt(5.0)) / 2;
    HeightResult h = canonical_height(sq, golden, 1e-10);
    CHECK(std::fabs(val(h) - 0.5 * std::log(phi)) <= 1e-10 + h.error_bound);

    // sqrt(2) is preperiodic under x^2 - 2
    RationalMap cheb = build_map(poly({-2, 0, 1}), poly({1}));
    AlgebraicPoint rt2 = AlgebraicPoint::from_poly(poly({-2, 0, 1}));
    HeightResult hz = canonical_height(cheb, rt2, 1e-10);
    CHECK(std::fabs(val(hz)) <= 1e-10 + hz.error_bound);

    // under x^2/2 the point sqrt(2) maps to 1, whose height is exactly log 2,
    // so hhat(sqrt 2) = (1/2) log 2; exercises the p-adic content series
    RationalMap half = build_map(poly({0, 0, 1}), poly({2}));
    HeightResult hh = canonical_height(half, rt2, 1e-9);
    CHECK(std::fabs(val(hh) - 0.5 * LOG2) <= 1e-9 + hh.error_bound);

    // tate-limit through exact pushforwards agrees at coarse tolerance
    HeightResult t1 = canonical_height(sq, golden, 1e-4, HeightMethod::TateLimit);
    CHECK(std::fabs(t1.value.to_double() - 0.5 * std::log(phi)) <= 1e-4 + t1.error_bound);
    HeightResult t2 = canonical_height(half, rt2, 1e-4, HeightMethod::TateLimit);
    CHECK(std::fabs(t2.value.to_double() - 0.5 * LOG2) <= 1e-4 + t2.error_bound);
}

TEST_CASE("preperiodicity: rational certificates") {
    RationalMap f1 = build_map(poly({-1, 0, 1}), poly({1})); // x^2 - 1
    PreperiodicResult r = preperiodic_test(f1, ProjPoint::from_rational(mpq_class(0)));
    REQUIRE(r.status == PreperiodicStatus::Preperiodic);
    CHECK(r.tail == 0);
    REQUIRE(r.cycle.size() == 2);
    CHECK(r.cycle[0].str() == "0");
    CHECK(r.cycle[1].str() == "-1");

    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    r = preperiodic_test(sq, ProjPoint::from_rational(mpq_class(2)));
    REQUIRE(r.status == PreperiodicStatus::Wandering);
    CHECK(r.witness_step == 0);
    CHECK(r.witness_height > r.comparison_bound);
    CHECK(std::fabs(r.witness_height - LOG2) < 1e-9);

    RationalMap cheb = build_map(poly({-2, 0, 1}), poly({1}));
    r = preperiodic_test(cheb, ProjPoint::from_rational(mpq_class(1, 3)));
    REQUIRE(r.status == PreperiodicStatus::Wandering);
    CHECK(r.witness_step == 1); // f(1/3) = -17/9 with log 17 > log 3
    r = preperiodic_test(cheb, ProjPoint::from_rational(mpq_class(2)));
    REQUIRE(r.status == PreperiodicStatus::Preperiodic);
    CHECK(r.cycle.size() == 1);

    r = preperiodic_test(sq, ProjPoint::infinity());
    REQUIRE(r.status == PreperiodicStatus::Preperiodic);
    CHECK(r.cycle.size() == 1);
    CHECK(r.cycle[0].is_infinity());

    // budget too small to close the 0 -> -1 -> 0 loop
    r = preperiodic_test(f1, ProjPoint::from_rational(mpq_class(0)), 0);
    CHECK(r.status == PreperiodicStatus::Undetermined);
}

TEST_CASE("preperiodicity: quadratic points") {
    RationalMap f1 = build_map(poly({-1, 0, 1}), poly({1}));
    AlgebraicPoint golden = AlgebraicPoint::from_poly(poly({-1, -1, 1}));
    PreperiodicResult r = preperiodic_test(f1, golden);
    REQUIRE(r.status == PreperiodicStatus::Preperiodic); // phi^2 - 1 = phi
    CHECK(r.tail == 0);
    CHECK(r.cycle_repr.size() == 1);

    RationalMap cheb = build_map(poly({-2, 0, 1}), poly({1}));
    AlgebraicPoint rt2 = AlgebraicPoint::from_poly(poly({-2, 0, 1}));
    r = preperiodic_test(cheb, rt2);
    REQUIRE(r.status == PreperiodicStatus::Preperiodic); // sqrt2 -> 0 -> -2 -> 2 -> 2
    CHECK(r.tail == 3);
    REQUIRE(r.cycle_repr.size() == 1);
    CHECK(r.cycle_repr[0] == "2");

    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    AlgebraicPoint onert2 = AlgebraicPoint::from_poly(poly({-1, -2, 1})); // 1 + sqrt 2
    r = preperiodic_test(sq, onert2);
    REQUIRE(r.status == PreperiodicStatus::Wandering);
    CHECK(r.witness_step == 0);

    // degree three is undetermined by design; reducible quadratics are rejected
    AlgebraicPoint cbrt2 = AlgebraicPoint::from_poly(poly({-2, 0, 0, 1}));
    CHECK(preperiodic_test(sq, cbrt2).status == PreperiodicStatus::Undetermined);
    AlgebraicPoint reducible = AlgebraicPoint::from_poly(poly({-1, 0, 1}));
    CHECK_THROWS_AS(preperiodic_test(sq, reducible), InputError);
}

TEST_CASE("small points: power map and Chebyshev-like maps") {
    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    SmallPointsResult r = small_points_enumerate(sq, 0.1);
    std::set<std::string> got;
    for (const auto& p : r.points) got.insert(p.str());
    CHECK(got == std::set<std::string>{"infinity", "0", "1", "-1"});
    CHECK(r.essential_minimum == 0.0);
    for (bool b : r.preperiodic) CHECK(b);

    RationalMap cheb = build_map(poly({-2, 0, 1}), poly({1}));
    r = small_points_enumerate(cheb, 0.1);
    got.clear();
    for (const auto& p : r.points) got.insert(p.str());
    CHECK(got == std::set<std::string>{"infinity", "0", "1", "-1", "2", "-2"});
    CHECK(r.essential_minimum >= -1e-10);

    RationalMap plus1 = build_map(poly({1, 0, 1}), poly({1}));
    r = small_points_enumerate(plus1, 0.05);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].is_infinity());

    RationalMap f1 = build_map(poly({-1, 0, 1}), poly({1}));
    r = small_points_enumerate(f1, 0.05);
    got.clear();
    for (const auto& p : r.points) got.insert(p.str());
    CHECK(got == std::set<std::string>{"infinity", "0", "1", "-1"});
}

TEST_CASE("small points: returned non-preperiodic heights respect the bound") {
    RationalMap f = build_map(poly({0, 1, 0, 2}), poly({1, 0, 3})); // (2x^3 + x)/(3x^2 + 1)
    double bound = 0.6;
    SmallPointsResult r = small_points_enumerate(f, bound);
    REQUIRE(!r.points.empty());
    for (size_t i = 0; i < r.points.size(); ++i) {
        if (r.preperiodic[i]) continue;
        CHECK(r.heights[i] <= bound + 2 * r.tol);
        CHECK(r.heights[i] >= -r.tol);
    }
    CHECK(r.essential_minimum >= -r.tol);
}

TEST_CASE("canonical height rejects bad tolerances") {
    RationalMap sq = build_map(poly({0, 0, 1}), poly({1}));
    CHECK_THROWS_AS(canonical_height(sq, ProjPoint::from_rational(mpq_class(2)), 0.0), InputError);
    CHECK_THROWS_AS(height_mass(sq, form(1, {1, 1}), -1.0), InputError);
}
