#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "optcas/path.hpp"
#include "optcas/scene.hpp"
#include "optcas/wavefront.hpp"

using namespace optcas;
using Catch::Approx;

TEST_CASE("Sym2 algebra") {
    Sym2 a{2.0, 0.5, 1.0};
    REQUIRE(a.det() == Approx(2.0 - 0.25));
    REQUIRE(a.trace() == Approx(3.0));
    double lo, hi;
    a.eigenvalues(lo, hi);
    REQUIRE(lo + hi == Approx(a.trace()));
    REQUIRE(lo * hi == Approx(a.det()));
    REQUIRE(lo <= hi);

    // rotation preserves the invariants
    Sym2 r = a.rotated(std::cos(0.7), std::sin(0.7));
    REQUIRE(r.det() == Approx(a.det()));
    REQUIRE(r.trace() == Approx(a.trace()));
    // full-circle rotation is the identity
    Sym2 full = a.rotated(1.0, 0.0);
    REQUIRE(full.a11 == Approx(a.a11));
    REQUIRE(full.a12 == Approx(a.a12));
    REQUIRE(full.a22 == Approx(a.a22));
}

TEST_CASE("free flight of a spherical wavefront") {
    // curvature 1/s becomes 1/(s+d)
    WavefrontState w{Sym2::isotropic(1.0), 1.0};
    PropagateResult p = propagate_free(w, 2.0);
    REQUIRE_FALSE(p.caustic);
    REQUIRE(p.state.Q.a11 == Approx(1.0 / 3.0));
    REQUIRE(p.state.Q.a22 == Approx(1.0 / 3.0));
    REQUIRE(p.state.Q.a12 == Approx(0.0).margin(1e-15));
    REQUIRE(p.area_factor == Approx(9.0));
    REQUIRE(p.state.s == Approx(3.0));
}

TEST_CASE("free flight with mixed principal curvatures") {
    WavefrontState w{{1.0, 0.0, -0.5}, 0.0};
    PropagateResult p = propagate_free(w, 1.0);
    REQUIRE_FALSE(p.caustic);
    REQUIRE(p.state.Q.a11 == Approx(0.5));
    REQUIRE(p.state.Q.a22 == Approx(-1.0));
    REQUIRE(p.area_factor == Approx(2.0 * 0.5));
}

TEST_CASE("converging front reaches a caustic") {
    WavefrontState w{Sym2::isotropic(-1.0), 0.0};
    PropagateResult p = propagate_free(w, 1.0);  // radius hits zero exactly
    REQUIRE(p.caustic);
    PropagateResult q = propagate_free(w, 0.5);
    REQUIRE_FALSE(q.caustic);
    REQUIRE(q.state.Q.a11 == Approx(-2.0));
}

TEST_CASE("reflection off a plane leaves curvatures unchanged") {
    WavefrontState w{{0.7, 0.1, 0.3}, 2.0};
    WavefrontState r = reflect_wavefront(w, 0.4, Sym2{});
    REQUIRE(r.Q.a11 == Approx(w.Q.a11));
    REQUIRE(r.Q.a12 == Approx(w.Q.a12));
    REQUIRE(r.Q.a22 == Approx(w.Q.a22));
    REQUIRE_THROWS_AS(reflect_wavefront(w, 0.0, Sym2{}), std::invalid_argument);
}

TEST_CASE("normal-incidence reflection off a sphere: mirror equation") {
    // source at distance R from a convex mirror of radius R: spherical wave
    // curvature 1/R picks up 2/R, leaving radius R/3
    double R = 2.0;
    WavefrontState w{Sym2::isotropic(1.0 / R), R};
    WavefrontState r = reflect_wavefront(w, 1.0, Sym2::isotropic(1.0 / R));
    REQUIRE(r.Q.a11 == Approx(3.0 / R));
    REQUIRE(r.Q.a22 == Approx(3.0 / R));
}

TEST_CASE("oblique reflection: in-plane and transverse factors differ") {
    double ct = 0.5, k = 0.25;
    WavefrontState w{Sym2::isotropic(1.0), 1.0};
    WavefrontState r = reflect_wavefront(w, ct, Sym2::isotropic(k));
    REQUIRE(r.Q.a11 == Approx(1.0 + 2.0 * k / ct));
    REQUIRE(r.Q.a22 == Approx(1.0 + 2.0 * k * ct));
}

TEST_CASE("plane-pair paths carry the planar enlargement 1/l^2") {
    Scene sc = build_scene({SceneKind::parallel_plates, 1.0, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 6);
    Vec3 x{0.12, -0.3, 0.4};
    for (const auto& seq : seqs) {
        OpticalPath p = solve_and_validate(sc, x, seq);
        REQUIRE(p.status == PathStatus::valid);
        EnlargementResult e = enlargement_factor_propagated(sc, p);
        REQUIRE(e.ok);
        REQUIRE_FALSE(e.caustic);
        REQUIRE(e.delta == Approx(1.0 / (p.length * p.length)).epsilon(1e-12));
        REQUIRE(e.sqrt_delta * p.length == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("single bounce off an isolated sphere: R/(2d(R+d))") {
    for (double R : {0.5, 1.0, 3.0}) {
        Scene sc;
        sc.cfg.kind = SceneKind::sphere_plate;
        sc.cfg.gap = 1.0;
        sc.cfg.sphere_radius = R;
        sc.scale = 1.0;
        sc.r_max = 10.0 * R;
        sc.z_max = 10.0 * R;
        sc.surfaces.push_back(Surface::make_sphere({0, 0, 0}, R));
        ReflectionSequence one;
        one.n = 1;
        one.multiplicity = 1;
        one.surf[0] = 0;
        for (double d : {0.1 * R, 0.5 * R, 2.0 * R}) {
            OpticalPath p = solve_and_validate(sc, {0, 0, -(R + d)}, one);
            REQUIRE(p.status == PathStatus::valid);
            REQUIRE(p.length == Approx(2.0 * d).epsilon(1e-10));
            EnlargementResult e = enlargement_factor_propagated(sc, p);
            REQUIRE(e.ok);
            REQUIRE(e.sqrt_delta == Approx(R / (2.0 * d * (R + d))).epsilon(1e-10));
        }
    }
}

TEST_CASE("huge sphere approaches the planar enlargement") {
    double R = 1e6, d = 0.5;
    Scene sc;
    sc.cfg.kind = SceneKind::sphere_plate;
    sc.cfg.gap = 1.0;
    sc.cfg.sphere_radius = R;
    sc.scale = 1.0;
    sc.r_max = 10.0;
    sc.z_max = 10.0;
    sc.surfaces.push_back(Surface::make_sphere({0, 0, 0}, R));
    ReflectionSequence one;
    one.n = 1;
    one.multiplicity = 1;
    one.surf[0] = 0;
    OpticalPath p = solve_and_validate(sc, {0, 0, -(R + d)}, one);
    REQUIRE(p.status == PathStatus::valid);
    EnlargementResult e = enlargement_factor_propagated(sc, p);
    REQUIRE(e.sqrt_delta * p.length == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("two-bounce cavity chord focuses into a caustic") {
    // concave wall, source past the focal point: the reflected bundle
    // crosses itself on the way back
    Scene sc;
    sc.cfg.kind = SceneKind::sphere_plate;
    sc.cfg.gap = 1.0;
    sc.cfg.sphere_radius = 1.0;
    sc.scale = 1.0;
    sc.r_max = 1.0;
    sc.z_max = 1.0;
    sc.surfaces.push_back(Surface::make_sphere({0, 0, 0}, 1.0, false));

    ReflectionSequence one;
    one.n = 1;
    one.multiplicity = 1;
    one.surf[0] = 0;
    OpticalPath far;
    far.seq = one;
    far.base = {0, 0, -0.5};
    far.node[0] = {0, 0, 1.0};  // far wall, 1.5 away
    far.length = 3.0;
    far.min_cos_incidence = 1.0;
    far.status = PathStatus::valid;
    EnlargementResult e = enlargement_factor_propagated(sc, far);
    REQUIRE(e.caustic);
    REQUIRE_FALSE(e.ok);

    // the near-wall bounce of the same class stays caustic-free
    OpticalPath near = solve_and_validate(sc, {0, 0, -0.5}, one);
    REQUIRE(near.status == PathStatus::valid);
    REQUIRE(near.length == Approx(1.0));
    EnlargementResult en = enlargement_factor_propagated(sc, near);
    REQUIRE(en.ok);
    REQUIRE_FALSE(en.caustic);
}

TEST_CASE("propagated and finite-difference enlargement agree") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 4);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ur(0.0, 0.8), uphi(-M_PI, M_PI), uz(0.05, 0.45);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 60; ++trial) {
        double r = ur(rng), phi = uphi(rng);
        Vec3 x{r * std::cos(phi), r * std::sin(phi), uz(rng)};
        for (const auto& seq : seqs) {
            OpticalPath p = solve_and_validate(sc, x, seq);
            if (p.status != PathStatus::valid) continue;
            EnlargementResult ep = enlargement_factor_propagated(sc, p);
            EnlargementResult ef = enlargement_factor_fd(sc, p);
            if (!ep.ok || !ef.ok) continue;
            REQUIRE(ef.delta == Approx(ep.delta).epsilon(1e-6));
            ++checked;
        }
    }
    REQUIRE(checked >= 60);
}

TEST_CASE("enlargement is reversal-invariant") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    ReflectionSequence fwd, rev;
    fwd.n = rev.n = 4;
    fwd.multiplicity = rev.multiplicity = 1;
    fwd.surf = {0, 1, 0, 1};
    rev.surf = {1, 0, 1, 0};
    Vec3 x{0.2, 0.05, 0.3};
    OpticalPath pf = solve_and_validate(sc, x, fwd);
    OpticalPath pr = solve_and_validate(sc, x, rev);
    REQUIRE(pf.status == PathStatus::valid);
    REQUIRE(pr.status == PathStatus::valid);
    EnlargementResult ef = enlargement_factor_propagated(sc, pf);
    EnlargementResult er = enlargement_factor_propagated(sc, pr);
    REQUIRE(ef.ok);
    REQUIRE(er.ok);
    REQUIRE(ef.delta == Approx(er.delta).epsilon(1e-8));
}

TEST_CASE("convex bodies never produce caustics") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.25, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 4);
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> ur(0.0, 1.2), uphi(-M_PI, M_PI), uz(0.02, 0.23);
    for (int trial = 0; trial < 60; ++trial) {
        double r = ur(rng), phi = uphi(rng);
        Vec3 x{r * std::cos(phi), r * std::sin(phi), uz(rng)};
        for (const auto& seq : seqs) {
            OpticalPath p = solve_and_validate(sc, x, seq);
            if (p.status != PathStatus::valid) continue;
            EnlargementResult e = enlargement_factor_propagated(sc, p);
            REQUIRE(e.ok);
            REQUIRE_FALSE(e.caustic);
        }
    }
}
