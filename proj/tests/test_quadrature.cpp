#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "optcas/quadrature.hpp"

using namespace optcas;
using Catch::Approx;

TEST_CASE("adaptive Simpson on smooth integrands") {
    REQUIRE(integrate_1d([](double x) { return x * x * x; }, 0.0, 1.0) == Approx(0.25));
    REQUIRE(integrate_1d([](double x) { return std::sin(x); }, 0.0, M_PI) ==
            Approx(2.0).epsilon(1e-10));
    REQUIRE(integrate_1d([](double x) { return std::exp(-x); }, 0.0, 30.0) ==
            Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate and invalid intervals") {
    REQUIRE(integrate_1d([](double x) { return x; }, 2.0, 2.0) == 0.0);
    REQUIRE_THROWS_AS(integrate_1d([](double x) { return x; }, 1.0, 0.0),
                      std::invalid_argument);
}

TEST_CASE("jump discontinuity is localized by bisection") {
    auto step = [](double x) { return x > 1.0 / 3.0 ? 1.0 : 0.0; };
    REQUIRE(integrate_1d(step, 0.0, 1.0, 1e-10) == Approx(2.0 / 3.0).margin(1e-8));
}

TEST_CASE("sharp peak") {
    // Lorentzian of width 1e-3 centered mid-interval
    double w = 1e-3;
    auto f = [&](double x) { return w / ((x - 0.5) * (x - 0.5) + w * w); };
    double exact = std::atan(0.5 / w) * 2.0;
    REQUIRE(integrate_1d(f, 0.0, 1.0, 1e-10) == Approx(exact).epsilon(1e-8));
}

TEST_CASE("axisymmetric volume integrals") {
    // unit cylinder volume
    auto one = [](double, double) { return 1.0; };
    REQUIRE(integrate_axisymmetric(
                one, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; }) ==
            Approx(M_PI).epsilon(1e-9));
    // cone z in [0, 1-r]
    REQUIRE(integrate_axisymmetric(
                one, 1.0, [](double) { return 0.0; }, [](double r) { return 1.0 - r; }) ==
            Approx(M_PI / 3.0).epsilon(1e-8));
    // linear-in-z integrand over the cylinder
    auto fz = [](double, double z) { return z; };
    REQUIRE(integrate_axisymmetric(
                fz, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; }) ==
            Approx(M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("iterated rectangle integrals") {
    auto f = [](double x, double y) { return x * y; };
    REQUIRE(integrate_rect2d(f, 0.0, 1.0, 0.0, 1.0) == Approx(0.25).epsilon(1e-10));
    auto g = [](double x, double y) { return std::sin(x) * std::cos(y); };
    REQUIRE(integrate_rect2d(g, 0.0, 0.5 * M_PI, 0.0, 0.5 * M_PI) ==
            Approx(1.0).epsilon(1e-9));
}
