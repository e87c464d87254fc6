#pragma once

#include <cmath>
#include <stdexcept>

#include "optcas/quadrature.hpp"
#include "optcas/scene.hpp"

namespace optcas {

// Dirichlet-scalar parallel-plate energy per unit area at separation h.
inline double plate_energy_density(double h) {
    return -M_PI * M_PI / (1440.0 * h * h * h);
}

enum class PfaBase { plate, sphere };

// Proximity-force estimate: tile the chosen base surface and assign each
// tile the plate-pair energy of the local normal gap. The two base choices
// disagree at finite gap; both are kept as independent comparators.
inline double pfa_energy(const Scene& sc, PfaBase base) {
    if (sc.cfg.kind == SceneKind::parallel_plates)
        return sc.area() * plate_energy_density(sc.cfg.gap);

    double R = sc.cfg.sphere_radius, a = sc.cfg.gap, zc = a + R;
    if (base == PfaBase::plate) {
        // gap above the plate at radius r: H(r) = zc - sqrt(R^2 - r^2),
        // parametrized r = R sin(phi) to keep the rim regular
        auto f = [&](double phi) {
            double H = zc - R * std::cos(phi);
            return 2.0 * M_PI * R * std::sin(phi) * R * std::cos(phi) * plate_energy_density(H);
        };
        return integrate_1d(f, 0.0, 0.5 * M_PI, 1e-11 * (1.0 + R * R / (a * a * a)));
    }
    // gap from a sphere point along its outward normal, mu = |cos| of the
    // polar angle on the lower hemisphere: d(mu) = (zc - R mu)/mu
    auto f = [&](double mu) {
        if (mu < 1e-12) return 0.0;
        double d = (zc - R * mu) / mu;
        return 2.0 * M_PI * R * R * plate_energy_density(d);
    };
    return integrate_1d(f, 0.0, 1.0, 1e-11 * (1.0 + R * R / (a * a * a)));
}

// Volume-weighted variant: -(pi^2/1440) * integral over the vacuum of
// (d1 + d2)^-4, d_i the distances to the two bodies.
inline double pfa_star_energy(const Scene& sc) {
    if (sc.cfg.kind == SceneKind::parallel_plates) {
        double a = sc.cfg.gap;
        auto f = [&](double) { return 1.0 / (a * a * a * a); };  // d1 + d2 = a in the gap
        return -(M_PI * M_PI / 1440.0) * sc.area() * integrate_1d(f, 0.0, a, 1e-13 / (a * a * a));
    }
    double R = sc.cfg.sphere_radius, a = sc.cfg.gap, zc = a + R;
    double L0 = a + 2.0 * R;  // map scale; integrand decays like distance^-4
    auto g = [&](double u, double t) -> double {
        if (u >= 1.0 - 1e-13 || t >= 1.0 - 1e-13) return 0.0;
        double r = L0 * u / (1.0 - u), z = L0 * t / (1.0 - t);
        double ju = L0 / ((1.0 - u) * (1.0 - u)), jt = L0 / ((1.0 - t) * (1.0 - t));
        double d2 = std::hypot(r, z - zc) - R;
        if (d2 <= 0.0) return 0.0;  // inside the sphere
        double s = z + d2;
        return 2.0 * M_PI * r / (s * s * s * s) * ju * jt;
    };
    return -(M_PI * M_PI / 1440.0) *
           integrate_rect2d(g, 0.0, 1.0, 0.0, 1.0, 1e-9 * (1.0 + R / (a * a)));
}

}  // namespace optcas
