#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "adelheight/pcf.hpp"
#include "adelheight/rng.hpp"

using namespace adelheight;

namespace {

BinForm form(long d, std::vector<long> coeffs) {
    std::vector<mpz_class> v(coeffs.begin(), coeffs.end());
    return BinForm(d, std::move(v));
}

// z^2 + c
RationalMap quad(long c) {
    return RationalMap::from_forms(form(2, {c, 0, 1}), form(2, {1, 0, 0}));
}

RationalMap cubic(long c1) { // z^3 + c1 z
    return RationalMap::from_forms(form(3, {0, c1, 0, 1}), form(3, {1, 0, 0, 0}));
}

RationalMap random_map(SplitMix64& rng, long dmax = 3, long height = 8) {
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

long orbit_size(const PcfCertificate& cert) {
    long n = 0;
    for (const auto& ev : cert.critical_points)
        n += static_cast<long>(ev.multiplicity) * ev.degree;
    return n;
}

const CriticalPointEvidence& find_point(const PcfCertificate& cert, const std::string& name) {
    for (const auto& ev : cert.critical_points)
        if (ev.point == name) return ev;
    REQUIRE(false);
    return cert.critical_points.front();
}

} // namespace

TEST_CASE("postcritically finite quadratic polynomials") {
    auto c0 = is_pcf(quad(0));
    CHECK(c0.status == PcfStatus::PCF);
    CHECK(c0.critical_points.size() == 2);
    for (const auto& ev : c0.critical_points) {
        CHECK(ev.status == PreperiodicStatus::Preperiodic);
        CHECK(ev.tail == 0);
        CHECK(ev.cycle.size() == 1);
    }
    CHECK(find_point(c0, "0").cycle == std::vector<std::string>{"0"});
    CHECK(find_point(c0, "infinity").cycle == std::vector<std::string>{"infinity"});

    auto c1 = is_pcf(quad(-1));
    CHECK(c1.status == PcfStatus::PCF);
    const auto& basilica = find_point(c1, "0");
    CHECK(basilica.tail == 0);
    CHECK(basilica.cycle == std::vector<std::string>{"0", "-1"});

    auto c2 = is_pcf(quad(-2));
    CHECK(c2.status == PcfStatus::PCF);
    const auto& cheb = find_point(c2, "0");
    CHECK(cheb.tail == 2);
    CHECK(cheb.cycle == std::vector<std::string>{"2"});
}

TEST_CASE("escaping critical orbits give wandering witnesses") {
    for (long c : {1L, 2L}) {
        auto cert = is_pcf(quad(c));
        CHECK(cert.status == PcfStatus::NotPCF);
        const auto& zero = find_point(cert, "0");
        CHECK(zero.status == PreperiodicStatus::Wandering);
        CHECK(zero.witness_step > 0);
        CHECK(zero.witness_height > zero.comparison_bound);
        // infinity remains fixed regardless
        CHECK(find_point(cert, "infinity").status == PreperiodicStatus::Preperiodic);
    }
}

TEST_CASE("degree three maps with rational critical points") {
    auto cert = is_pcf(cubic(-3)); // critical points +-1, infinity (double)
    CHECK(cert.status == PcfStatus::PCF);
    CHECK(cert.critical_points.size() == 3);
    CHECK(orbit_size(cert) == 4);
    CHECK(find_point(cert, "infinity").multiplicity == 2);
    const auto& plus = find_point(cert, "1");
    CHECK(plus.tail == 1);
    CHECK(plus.cycle == std::vector<std::string>{"-2"});
    const auto& minus = find_point(cert, "-1");
    CHECK(minus.tail == 1);
    CHECK(minus.cycle == std::vector<std::string>{"2"});
}

TEST_CASE("quadratic critical points are tracked exactly") {
    auto cert = is_pcf(cubic(1)); // critical points at roots of 3x^2+1
    REQUIRE(cert.critical_points.size() == 2);
    CHECK(orbit_size(cert) == 4);
    const auto& quad_orbit = find_point(cert, "root of 3*x^2 + 1");
    CHECK(quad_orbit.degree == 2);
    CHECK(quad_orbit.status == PreperiodicStatus::Wandering);
    CHECK(quad_orbit.witness_height > quad_orbit.comparison_bound);
    CHECK(cert.status == PcfStatus::NotPCF);
}

TEST_CASE("cubic critical factors stay undetermined") {
    RationalMap f = RationalMap::from_forms(form(4, {0, 1, 0, 0, 1}),
                                            form(4, {1, 0, 0, 0, 0})); // z^4 + z
    auto cert = is_pcf(f);
    CHECK(cert.status == PcfStatus::Undetermined);
    CHECK(orbit_size(cert) == 6);
    const auto& cub = find_point(cert, "root of 4*x^3 + 1");
    CHECK(cub.degree == 3);
    CHECK(cub.status == PreperiodicStatus::Undetermined);
    CHECK(find_point(cert, "infinity").status == PreperiodicStatus::Preperiodic);
}

TEST_CASE("critical height vanishes exactly on certified maps") {
    for (long c : {0L, -1L, -2L}) {
        auto h = critical_height(quad(c), 1e-10);
        CHECK(std::abs(h.value.to_double()) <= 1e-10);
        CHECK(h.error_bound <= 1e-10);
    }
    auto h3 = critical_height(cubic(-3), 1e-10);
    CHECK(std::abs(h3.value.to_double()) <= 1e-10);
}

TEST_CASE("critical height sums the canonical heights of critical points") {
    for (long c : {1L, 2L, 3L}) {
        RationalMap f = quad(c);
        auto mass = critical_height(f, 1e-9);
        auto h0 = canonical_height(f, ProjPoint(0, 1), 1e-9);
        CHECK(std::abs(mass.value.to_double() - h0.value.to_double()) <= 2e-9);
        CHECK(mass.value.to_double() > 0.1);
    }

    // quadratic critical pair: the mass counts both conjugates
    RationalMap f = cubic(1);
    auto mass = critical_height(f, 1e-9);
    auto pair_height =
        canonical_height(f, AlgebraicPoint::from_poly(IntPoly({1, 0, 3})), 1e-9);
    CHECK(std::abs(mass.value.to_double() - 2.0 * pair_height.value.to_double()) <= 3e-9);
}

TEST_CASE("certificates are conjugation invariant") {
    Moebius shift(1, 1, 0, 1);   // z -> z + 1
    Moebius invert(0, 1, 1, 0);  // z -> 1/z

    for (long c : {-2L, -1L, 0L, 1L, 2L}) {
        auto base = is_pcf(quad(c));
        CHECK(is_pcf(conjugate(quad(c), shift)).status == base.status);
        CHECK(is_pcf(conjugate(quad(c), invert)).status == base.status);
    }

    RationalMap g = conjugate(quad(-2), shift);
    auto hg = critical_height(g, 1e-9);
    CHECK(std::abs(hg.value.to_double()) <= 1e-9);
}

TEST_CASE("critical mass is nonnegative on random maps") {
    SplitMix64 rng(41);
    for (int i = 0; i < 12; ++i) {
        RationalMap f = random_map(rng);
        auto h = critical_height(f, 1e-8);
        CHECK(h.value.to_double() >= -1e-8);
        auto cert = is_pcf(f, 24);
        CHECK(orbit_size(cert) == 2 * f.d - 2);
    }
}

TEST_CASE("budget controls the certificate") {
    auto lazy = is_pcf(quad(1), 0);
    CHECK(lazy.status == PcfStatus::Undetermined);
    CHECK(find_point(lazy, "0").status == PreperiodicStatus::Undetermined);

    CHECK_THROWS_AS(is_pcf(quad(1), -1), InputError);
}
