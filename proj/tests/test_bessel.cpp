#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "optcas/bessel.hpp"

using namespace optcas;
using Catch::Approx;

// reference values computed with mpmath (dps=30)
TEST_CASE("modified Bessel K: frozen reference values") {
    REQUIRE(bessel_k0(1.0) == Approx(0.421024438240708333335627379213).epsilon(1e-13));
    REQUIRE(bessel_k1(1.0) == Approx(0.601907230197234574737540001536).epsilon(1e-13));
    REQUIRE(bessel_k2(0.5) == Approx(7.55018355124086943656770578023).epsilon(1e-13));
    REQUIRE(bessel_k2(1.0) == Approx(1.62483889863517748281070738228).epsilon(1e-13));
    REQUIRE(bessel_k2(2.0) == Approx(0.253759754566055862937318381968).epsilon(1e-13));
    REQUIRE(bessel_k2(10.0) == Approx(2.1509817006932768730664564424e-5).epsilon(1e-13));
    REQUIRE(bessel_k2(20.0) == Approx(6.32954361229222811048173027878e-10).epsilon(1e-13));
}

TEST_CASE("recurrence K2 = K0 + 2 K1 / z") {
    for (double z = 1e-3; z < 600.0; z *= 2.7) {
        double lhs = bessel_k2(z);
        double rhs = bessel_k0(z) + 2.0 * bessel_k1(z) / z;
        REQUIRE(lhs == Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("small-argument behavior") {
    // z^2 K2(z) -> 2
    REQUIRE(1e-8 * bessel_k2(1e-4) == Approx(2.0).epsilon(1e-7));
    // K0(z) ~ -log(z/2) - gamma
    double z = 1e-6;
    REQUIRE(bessel_k0(z) == Approx(-std::log(0.5 * z) - 0.57721566490153286).epsilon(1e-10));
}

TEST_CASE("positivity and decay") {
    double prev = bessel_k2(0.1);
    for (double z = 0.2; z < 50.0; z += 0.7) {
        double v = bessel_k2(z);
        REQUIRE(v > 0.0);
        REQUIRE(v < prev);
        prev = v;
    }
}

TEST_CASE("domain errors") {
    REQUIRE_THROWS_AS(bessel_k0(0.0), std::domain_error);
    REQUIRE_THROWS_AS(bessel_k1(-1.0), std::domain_error);
    REQUIRE_THROWS_AS(bessel_k2(0.0), std::domain_error);
}
