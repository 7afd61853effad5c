#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "adelheight/adeliccurve.hpp"
#include "adelheight/rng.hpp"

using namespace adelheight;

namespace {

OpenModel z_half() { return OpenModel::spec_z({mpz_class(2)}); }

BoundaryDivisor unit_d0(const OpenModel& m) {
    ArithDivisor d(m);
    for (const auto& p : m.boundary_primes) d.set_boundary(p, 1);
    d.set_arch(LogReal(mpq_class(1)));
    return BoundaryDivisor(d);
}

mpq_class random_q(SplitMix64& rng, long lim = 9) {
    long num = long(rng.next_below(2 * lim + 1)) - lim;
    long den = 1 + long(rng.next_below(lim));
    return mpq_class(num, den);
}

// a random exact arch coefficient: rational + rational * log 2 + ... log 5
LogReal random_arch(SplitMix64& rng) {
    LogReal out(random_q(rng));
    out += LogReal::log_prime(mpz_class(2), random_q(rng, 4));
    if (rng.next_below(2)) out += LogReal::log_prime(mpz_class(5), random_q(rng, 4));
    return out;
}

ArithDivisor random_divisor(SplitMix64& rng, const OpenModel& m, bool with_interior = true) {
    ArithDivisor e(m);
    for (const auto& p : m.boundary_primes)
        if (rng.next_below(3)) e.set_boundary(p, random_q(rng));
    if (with_interior && rng.next_below(3) == 0)
        e.set_interior(mpz_class(11), mpz_class(long(rng.next_below(5)) - 2));
    e.set_arch(random_arch(rng));
    return e;
}

const double INF = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("effectivity") {
    OpenModel m = z_half();
    CHECK(is_effective(ArithDivisor(m)));
    ArithDivisor neg(m);
    neg.set_arch(LogReal(mpq_class(-1, 2)));
    CHECK(!is_effective(neg));
    ArithDivisor three(OpenModel::spec_z());
    three.set_interior(mpz_class(3), 1);
    CHECK(is_effective(three));
    // exact sign decision on a formally nonzero arch constant
    ArithDivisor tricky(m);
    tricky.set_arch(LogReal::log_prime(mpz_class(2), mpq_class(2)) -
                    LogReal::log_prime(mpz_class(5)));
    CHECK(!is_effective(tricky)); // 2 log 2 < log 5
}

TEST_CASE("boundary norm on the worked examples") {
    OpenModel m = z_half();
    BoundaryDivisor d0 = unit_d0(m);

    ArithDivisor e1(m);
    e1.set_boundary(mpz_class(2), mpq_class(1, 2));
    e1.set_arch(LogReal(mpq_class(1, 4)));
    CHECK(boundary_norm(e1, d0) == 0.5);

    ArithDivisor e2(m);
    e2.set_interior(mpz_class(3), 1);
    CHECK(boundary_norm(e2, d0) == INF);

    ArithDivisor e3(m);
    e3.set_boundary(mpz_class(2), mpq_class(-2));
    CHECK(boundary_norm(e3, d0) == 2.0);
}

TEST_CASE("norm axioms on random divisors") {
    OpenModel m = OpenModel::spec_z({mpz_class(2), mpz_class(7)});
    ArithDivisor d0base(m);
    d0base.set_boundary(mpz_class(2), mpq_class(1));
    d0base.set_boundary(mpz_class(7), mpq_class(3, 2));
    d0base.set_arch(LogReal(mpq_class(2)));
    BoundaryDivisor d0(d0base);

    SplitMix64 rng(0x17);
    for (int t = 0; t < 200; ++t) {
        ArithDivisor e = random_divisor(rng, m, false);
        ArithDivisor f = random_divisor(rng, m, false);
        double ne = boundary_norm(e, d0), nf = boundary_norm(f, d0);
        CHECK((ne == 0) == e.is_zero());
        long a = long(rng.next_below(9)) - 4;
        if (a != 0) {
            double na = boundary_norm(mpq_class(a) * e, d0);
            CHECK(na == doctest::Approx(std::fabs(double(a)) * ne).epsilon(1e-12));
        }
        double ns = boundary_norm(e + f, d0);
        CHECK(ns <= ne + nf + 1e-12);
    }
}

TEST_CASE("norm equivalence between boundary divisors") {
    OpenModel m = OpenModel::spec_z({mpz_class(2), mpz_class(7)});
    SplitMix64 rng(0x23);
    for (int t = 0; t < 40; ++t) {
        ArithDivisor a(m), b(m);
        mpq_class a2(1 + long(rng.next_below(6)), 1 + long(rng.next_below(3)));
        mpq_class a7(1 + long(rng.next_below(6)), 1 + long(rng.next_below(3)));
        mpq_class b2(1 + long(rng.next_below(6)), 1 + long(rng.next_below(3)));
        mpq_class b7(1 + long(rng.next_below(6)), 1 + long(rng.next_below(3)));
        a.set_boundary(mpz_class(2), a2).set_boundary(mpz_class(7), a7);
        b.set_boundary(mpz_class(2), b2).set_boundary(mpz_class(7), b7);
        long arch_a = 1 + long(rng.next_below(4)), arch_b = 1 + long(rng.next_below(4));
        a.set_arch(LogReal(mpq_class(arch_a)));
        b.set_arch(LogReal(mpq_class(arch_b)));
        BoundaryDivisor da(a), db(b);
        double r = 1;
        auto ratio = [&r](const mpq_class& x, const mpq_class& y) {
            r = std::max({r, mpq_class(x / y).get_d(), mpq_class(y / x).get_d()});
        };
        ratio(a2, b2);
        ratio(a7, b7);
        ratio(mpq_class(arch_a), mpq_class(arch_b));
        ArithDivisor e = random_divisor(rng, m, false);
        double na = boundary_norm(e, da), nb = boundary_norm(e, db);
        if (na == 0) {
            CHECK(nb == 0);
            continue;
        }
        CHECK(nb <= r * na * (1 + 1e-12));
        CHECK(nb >= na / r * (1 - 1e-12));
    }
}

TEST_CASE("arithmetic degree and the product formula") {
    OpenModel m = z_half();
    ArithDivisor div2 = principal_divisor(mpq_class(2), m);
    CHECK(div2.boundary.at(mpz_class(2)) == 1);
    CHECK(arithmetic_degree(div2).is_formal_zero());

    ArithDivisor archonly(m);
    archonly.set_arch(LogReal(mpq_class(2)));
    CHECK(arithmetic_degree(archonly).to_double() == doctest::Approx(1.0));

    ArithDivisor three(OpenModel::spec_z());
    three.set_interior(mpz_class(3), 1);
    CHECK(arithmetic_degree(three).to_double() == doctest::Approx(std::log(3.0)));

    SplitMix64 rng(0x31);
    for (int t = 0; t < 100; ++t) {
        mpq_class f = random_q(rng, 40);
        if (f == 0) continue;
        CHECK(arithmetic_degree(principal_divisor(f, m)).is_formal_zero());
        CHECK(arithmetic_degree(principal_divisor(f, OpenModel::spec_z())).is_formal_zero());
    }
}

TEST_CASE("pic_reduce: canonical classes") {
    OpenModel m = z_half();
    PicClass zero = pic_reduce(principal_divisor(mpq_class(2), m));
    CHECK(zero.boundary.empty());
    CHECK(zero.arch.is_formal_zero());

    // t on the boundary with arch -2 t log 2 reduces to frac(t)
    auto klass = [&m](const mpq_class& t) {
        ArithDivisor e(m);
        e.set_boundary(mpz_class(2), t);
        e.set_arch(mpq_class(-2) * t * LogReal::log_prime(mpz_class(2)));
        return pic_reduce(e);
    };
    PicClass c = klass(mpq_class(7, 3));
    CHECK(c.boundary.at(mpz_class(2)) == mpq_class(1, 3));
    CHECK((c.arch + mpq_class(2, 3) * LogReal::log_prime(mpz_class(2))).is_formal_zero());

    // the induced map t -> class has period exactly 1
    for (const mpq_class& t : {mpq_class(0), mpq_class(7, 3), mpq_class(-5, 4), mpq_class(9)}) {
        CHECK(klass(t) == klass(t + 1));
        CHECK(!(klass(t) == klass(t + mpq_class(1, 2))));
    }

    ArithDivisor three(OpenModel::spec_z());
    three.set_interior(mpz_class(3), 1);
    PicClass c3 = pic_reduce(three);
    CHECK(c3.boundary.empty());
    CHECK((c3.arch - mpq_class(2) * LogReal::log_prime(mpz_class(3))).is_formal_zero());
}

TEST_CASE("pic_reduce preserves degree and is idempotent") {
    OpenModel m = OpenModel::spec_z({mpz_class(2), mpz_class(7)});
    SplitMix64 rng(0x47);
    for (int t = 0; t < 60; ++t) {
        ArithDivisor e = random_divisor(rng, m, true);
        PicClass c = pic_reduce(e);
        for (const auto& [p, q] : c.boundary) {
            CHECK(q >= 0);
            CHECK(q < 1);
        }
        ArithDivisor rep = pic_representative(c);
        CHECK((arithmetic_degree(rep) - arithmetic_degree(e)).is_formal_zero());
        CHECK(pic_reduce(rep) == c);
    }
}

TEST_CASE("cauchy limits: worked examples") {
    OpenModel m = z_half();
    BoundaryDivisor d0 = unit_d0(m);

    // (1 - 2^-i) at infinity converges to 1
    std::vector<ArithDivisor> seq;
    for (int i = 1; i <= 6; ++i) {
        ArithDivisor e(m);
        e.set_arch(LogReal(mpq_class(1) - mpq_class(1, mpz_class(1) << i)));
        seq.push_back(e);
    }
    CauchyLimit lim = cauchy_limit(seq, d0);
    REQUIRE(lim.cauchy);
    CHECK((lim.limit.arch - LogReal(mpq_class(1))).is_formal_zero());
    CHECK(is_effective(lim.limit)); // effective terms, effective limit

    // i at infinity diverges; the offending pair is reported
    seq.clear();
    for (int i = 1; i <= 5; ++i) {
        ArithDivisor e(m);
        e.set_arch(LogReal(mpq_class(i)));
        seq.push_back(e);
    }
    lim = cauchy_limit(seq, d0);
    CHECK(!lim.cauchy);
    CHECK(lim.bad_i >= 0);

    // boundary prime 2 constant plus vanishing arch
    seq.clear();
    for (int i = 1; i <= 6; ++i) {
        ArithDivisor e(m);
        e.set_boundary(mpz_class(2), 1);
        e.set_arch(LogReal(mpq_class(1, mpz_class(1) << i)));
        seq.push_back(e);
    }
    lim = cauchy_limit(seq, d0);
    REQUIRE(lim.cauchy);
    CHECK(lim.limit.boundary.at(mpz_class(2)) == 1);
    CHECK(lim.limit.arch.is_formal_zero());
}

TEST_CASE("cauchy limits: geometric boundary tails and rejections") {
    OpenModel m = z_half();
    BoundaryDivisor d0 = unit_d0(m);

    // boundary coefficient 1 - 3^-i: limit exactly 1
    std::vector<ArithDivisor> seq;
    mpz_class pw = 1;
    for (int i = 1; i <= 5; ++i) {
        pw *= 3;
        ArithDivisor e(m);
        e.set_boundary(mpz_class(2), mpq_class(1) - mpq_class(1, pw));
        seq.push_back(e);
    }
    CauchyLimit lim = cauchy_limit(seq, d0);
    REQUIRE(lim.cauchy);
    CHECK(lim.limit.boundary.at(mpz_class(2)) == 1);

    // incommensurable arch increments: certification fails
    seq.clear();
    ArithDivisor a(m), b(m), c(m);
    a.set_arch(LogReal(mpq_class(0)));
    b.set_arch(LogReal::log_prime(mpz_class(2), mpq_class(1, 2)));
    c.set_arch(LogReal::log_prime(mpz_class(2), mpq_class(1, 2)) +
               LogReal::log_prime(mpz_class(3), mpq_class(1, 8)));
    seq = {a, b, c};
    lim = cauchy_limit(seq, d0);
    CHECK(!lim.cauchy);

    // interior parts must agree
    ArithDivisor i1(m), i2(m);
    i1.set_interior(mpz_class(3), 1);
    lim = cauchy_limit({i1, i2}, d0);
    CHECK(!lim.cauchy);
    CHECK(lim.reason.find("interior") != std::string::npos);

    // mixed models and empty input are errors
    OpenModel other = OpenModel::spec_z();
    std::vector<ArithDivisor> mixed{ArithDivisor(other)};
    CHECK_THROWS_AS(cauchy_limit(mixed, d0), InputError);
    std::vector<ArithDivisor> empty;
    CHECK_THROWS_AS(cauchy_limit(empty, d0), InputError);
}

TEST_CASE("divisor validation") {
    OpenModel m = z_half();
    ArithDivisor e(m);
    CHECK_THROWS_AS(e.set_interior(mpz_class(2), 1), InputError); // boundary prime
    CHECK_THROWS_AS(e.set_boundary(mpz_class(3), 1), InputError); // not boundary
    CHECK_THROWS_AS(e.set_interior(mpz_class(4), 1), InputError); // not prime

    ArithDivisor three(OpenModel::spec_z());
    three.set_interior(mpz_class(3), 1);
    CHECK_THROWS_AS(mpq_class(1, 2) * three, InputError); // breaks integrality

    ArithDivisor no_arch(m);
    no_arch.set_boundary(mpz_class(2), 1);
    CHECK_THROWS_AS(BoundaryDivisor{no_arch}, InputError);
    ArithDivisor neg(m);
    neg.set_boundary(mpz_class(2), -1);
    neg.set_arch(LogReal(mpq_class(1)));
    CHECK_THROWS_AS(BoundaryDivisor{neg}, InputError);

    // zero scaling and cancellation drop entries
    ArithDivisor x(m);
    x.set_boundary(mpz_class(2), mpq_class(3, 4));
    ArithDivisor y = x - x;
    CHECK(y.is_zero());
    CHECK((mpq_class(0) * x).is_zero());
}
