#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "optcas/path.hpp"
#include "optcas/scene.hpp"

using namespace optcas;
using Catch::Approx;

TEST_CASE("sequence enumeration: counts and multiplicities") {
    Scene sc = build_scene({SceneKind::parallel_plates, 1.0, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 4);
    // n=1: two families, n=2: one canonical loop, n=3: two, n=4: one
    REQUIRE(seqs.size() == 6);
    int n_even = 0, n_odd = 0;
    for (const auto& s : seqs) {
        for (int i = 1; i < s.n; ++i) REQUIRE(s.surf[i] != s.surf[i - 1]);
        if (s.n % 2 == 0) {
            REQUIRE(s.multiplicity == 2);
            ++n_even;
        } else {
            REQUIRE(s.multiplicity == 1);
            ++n_odd;
        }
    }
    REQUIRE(n_even == 2);
    REQUIRE(n_odd == 4);

    REQUIRE_THROWS_AS(enumerate_sequences(sc, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(enumerate_sequences(sc, kMaxReflections + 1), std::invalid_argument);
}

TEST_CASE("single-surface scene has only the one-reflection class") {
    Scene sc = build_scene({SceneKind::sphere_plate, 1.0, 1.0, 1.0});
    Scene plate_only = single_body_scene(sc, 0);
    auto seqs = enumerate_sequences(plate_only, 6);
    REQUIRE(seqs.size() == 1);
    REQUIRE(seqs[0].n == 1);
}

// plate pair at gap a, base height z: closed-path lengths are
// 2z and 2(a-z) for n=1; 2ka for n=2k; 2ka+2z and 2(k+1)a-2z for n=2k+1
TEST_CASE("plate-pair path lengths match the image construction") {
    double a = 0.8;
    Scene sc = build_scene({SceneKind::parallel_plates, a, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 6);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uz(0.05, 0.95);
    std::uniform_real_distribution<double> uxy(-0.4, 0.4);
    for (int trial = 0; trial < 100; ++trial) {
        double z = a * uz(rng);
        Vec3 x{uxy(rng), uxy(rng), z};
        for (const auto& seq : seqs) {
            OpticalPath p = solve_and_validate(sc, x, seq);
            REQUIRE(p.status == PathStatus::valid);
            double expect;
            int k = seq.n / 2;
            if (seq.n % 2 == 0)
                expect = 2.0 * k * a;
            else if (seq.surf[0] == 0)
                expect = 2.0 * k * a + 2.0 * z;
            else
                expect = 2.0 * (k + 1) * a - 2.0 * z;
            REQUIRE(p.length == Approx(expect).epsilon(1e-10));
            REQUIRE(p.residual <= 1e-8);
            // vertical bounces: every node sits above the base point
            for (int i = 0; i < seq.n; ++i) {
                REQUIRE(p.node[i].x == Approx(x.x).margin(1e-9));
                REQUIRE(p.node[i].y == Approx(x.y).margin(1e-9));
            }
        }
    }
}

TEST_CASE("sphere-plate paths: on-surface nodes, specular bounces") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 4);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ur(0.0, 0.6), uphi(-M_PI, M_PI),
        uz(0.05, 0.45);
    int valid_count = 0;
    for (int trial = 0; trial < 50; ++trial) {
        double r = ur(rng), phi = uphi(rng);
        Vec3 x{r * std::cos(phi), r * std::sin(phi), uz(rng)};
        for (const auto& seq : seqs) {
            OpticalPath p = solve_and_validate(sc, x, seq);
            if (p.status != PathStatus::valid) continue;
            ++valid_count;
            REQUIRE(p.residual <= 1e-8);
            REQUIRE(p.min_cos_incidence > 1e-6);
            for (int i = 0; i < seq.n; ++i)
                REQUIRE(on_surface(sc.surfaces[seq.surf[i]], p.node[i], 1e-7 * sc.scale));
            // independent specularity check at every node
            for (int i = 0; i < seq.n; ++i) {
                Vec3 prev = (i == 0) ? p.base : p.node[i - 1];
                Vec3 next = (i == seq.n - 1) ? p.base : p.node[i + 1];
                Dir3 din(p.node[i] - prev);
                Dir3 dout(next - p.node[i]);
                Vec3 n = normal_at(sc.surfaces[seq.surf[i]], p.node[i]);
                Dir3 rfl = reflect(din, Dir3(n));
                REQUIRE(norm(rfl.vec() - dout.vec()) < 1e-8);
            }
        }
    }
    REQUIRE(valid_count > 100);
}

TEST_CASE("reversed traversal gives the same length") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    ReflectionSequence fwd;  // plate, sphere, plate, sphere
    fwd.n = 4;
    fwd.multiplicity = 1;
    fwd.surf = {0, 1, 0, 1};
    ReflectionSequence rev;
    rev.n = 4;
    rev.multiplicity = 1;
    rev.surf = {1, 0, 1, 0};
    Vec3 x{0.15, -0.1, 0.3};
    OpticalPath pf = solve_and_validate(sc, x, fwd);
    OpticalPath pr = solve_and_validate(sc, x, rev);
    REQUIRE(pf.status == PathStatus::valid);
    REQUIRE(pr.status == PathStatus::valid);
    REQUIRE(pf.length == Approx(pr.length).epsilon(1e-10));
    // node lists coincide in reverse order
    for (int i = 0; i < 4; ++i) REQUIRE(norm(pf.node[i] - pr.node[3 - i]) < 1e-7);
}

TEST_CASE("path lengths respect the surface-distance lower bound") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 4);
    Vec3 x{0.2, 0.1, 0.25};
    for (const auto& seq : seqs) {
        OpticalPath p = solve_and_validate(sc, x, seq);
        if (p.status != PathStatus::valid) continue;
        double dmin = 1e300;
        for (int i = 0; i < seq.n; ++i) {
            const Surface& s = sc.surfaces[seq.surf[i]];
            double d = (s.kind == SurfaceKind::plane)
                           ? std::fabs(dot(x - s.base, s.normal))
                           : std::fabs(norm(x - s.center) - s.radius);
            dmin = std::min(dmin, d);
        }
        REQUIRE(p.length >= 2.0 * dmin - 1e-12);
    }
}

TEST_CASE("status taxonomy") {
    REQUIRE(std::string(to_string(PathStatus::valid)) == "valid");
    REQUIRE(std::string(to_string(PathStatus::no_convergence)) == "no_convergence");
    REQUIRE(std::string(to_string(PathStatus::off_surface)) == "off_surface");
    REQUIRE(std::string(to_string(PathStatus::shadowed)) == "shadowed");
    REQUIRE(std::string(to_string(PathStatus::grazing)) == "grazing");
    REQUIRE(std::string(to_string(PathStatus::penetrates)) == "penetrates");
}

TEST_CASE("shadowed: plate bounce blocked by the sphere") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    ReflectionSequence plate1;
    plate1.n = 1;
    plate1.multiplicity = 1;
    plate1.surf[0] = 0;
    // directly above the sphere: the vertical leg crosses it
    OpticalPath p = solve_and_validate(sc, {0, 0, 2.8}, plate1);
    REQUIRE(p.status == PathStatus::shadowed);
    // off to the side at the same height: clear line of sight
    OpticalPath q = solve_and_validate(sc, {1.5, 0, 2.8}, plate1);
    REQUIRE(q.status == PathStatus::valid);
}

TEST_CASE("penetrates: base point inside a body") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    ReflectionSequence plate1;
    plate1.n = 1;
    plate1.multiplicity = 1;
    plate1.surf[0] = 0;
    OpticalPath p = solve_and_validate(sc, {0, 0, 1.5}, plate1);  // sphere center
    REQUIRE(p.status == PathStatus::penetrates);
}

TEST_CASE("off_surface: stationary foot beyond a finite plate") {
    // hand-built scene: one finite plate, one sphere above it
    Scene sc;
    sc.cfg.kind = SceneKind::sphere_plate;
    sc.cfg.gap = 0.5;
    sc.cfg.sphere_radius = 1.0;
    sc.scale = 0.5;
    sc.r_max = 4.0;
    sc.z_max = 3.5;
    sc.surfaces.push_back(Surface::make_plane({0, 0, 0}, Dir3(0, 0, 1), 1.0, 1.0));
    sc.surfaces.push_back(Surface::make_sphere({0, 0, 1.5}, 1.0));
    sc.surfaces[0].name = "plate";
    sc.surfaces[1].name = "sphere";

    ReflectionSequence plate1;
    plate1.n = 1;
    plate1.multiplicity = 1;
    plate1.surf[0] = 0;
    OpticalPath p = solve_and_validate(sc, {2.0, 0, 0.3}, plate1);
    REQUIRE(p.status == PathStatus::off_surface);
    OpticalPath q = solve_and_validate(sc, {0.3, 0, 0.3}, plate1);
    REQUIRE(q.status == PathStatus::valid);
}

TEST_CASE("far-field points lose the two-bounce gap path") {
    Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
    auto seqs = enumerate_sequences(sc, 2);
    const ReflectionSequence* two = nullptr;
    for (const auto& s : seqs)
        if (s.n == 2) two = &s;
    // between plate and sphere: valid
    REQUIRE(solve_and_validate(sc, {0.1, 0, 0.25}, *two).status == PathStatus::valid);
    // far out to the side the path, if it exists, is much longer than in the gap
    OpticalPath far = solve_and_validate(sc, {3.2, 0, 0.4}, *two);
    if (far.status == PathStatus::valid) REQUIRE(far.length > 3.0);
}
