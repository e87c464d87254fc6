#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "optcas/surface.hpp"

namespace optcas {

enum class SceneKind { parallel_plates, sphere_plate };

struct SceneConfig {
    SceneKind kind = SceneKind::parallel_plates;
    double gap = 1.0;            // closest surface-to-surface separation a
    double side = 1.0;           // plate side length L (parallel_plates), area = L^2
    double sphere_radius = 1.0;  // R (sphere_plate)
};

// Two-body scene. Surface 0 is the base plate (z = 0, vacuum above); surface 1
// is either the upper plate at z = gap or the sphere centered at z = gap + R.
struct Scene {
    SceneConfig cfg;
    std::vector<Surface> surfaces;
    double scale = 1.0;  // characteristic length for tolerances

    // Axisymmetric bounding region r in [0, r_max], z in [0, z_max]
    // (sphere_plate). For plates the integration region is the slab
    // side x side x [0, gap].
    double r_max = 0.0;
    double z_max = 0.0;

    bool axisymmetric() const { return cfg.kind == SceneKind::sphere_plate; }
    double area() const { return cfg.side * cfg.side; }
    double xi() const { return cfg.gap / cfg.sphere_radius; }

    // Strict vacuum-domain membership (outside all bodies).
    bool contains(const Vec3& p) const {
        for (const Surface& s : surfaces) {
            if (s.kind == SurfaceKind::plane) {
                if (dot(p - s.base, s.normal) <= 0.0) return false;
            } else {
                double d = norm(p - s.center);
                if (s.vacuum_outside ? d <= s.radius : d >= s.radius) return false;
            }
        }
        return true;
    }

    // Membership in the bounding region the class integrals are defined over:
    // the slab between the plates, or the cylinder r <= r_max, 0 <= z <= z_max.
    // Valid paths exist (with rapidly decaying weight) arbitrarily far out to
    // the side, so the region is a definitional cutoff shared by every
    // integration route, not just a sampling convenience.
    bool in_bounding_region(const Vec3& p) const {
        if (p.z < 0.0 || p.z > z_max) return false;
        if (cfg.kind == SceneKind::parallel_plates) {
            double h = 0.5 * cfg.side;
            return std::fabs(p.x) <= h && std::fabs(p.y) <= h;
        }
        return p.x * p.x + p.y * p.y <= r_max * r_max;
    }
};

inline Scene build_scene(const SceneConfig& cfg) {
    if (!(cfg.gap > 0.0)) throw std::invalid_argument("build_scene: gap must be positive");
    Scene sc;
    sc.cfg = cfg;
    sc.scale = cfg.gap;
    if (cfg.kind == SceneKind::parallel_plates) {
        if (!(cfg.side > 0.0)) throw std::invalid_argument("build_scene: side must be positive");
        sc.surfaces.push_back(Surface::make_plane({0, 0, 0}, Dir3(0, 0, 1)));
        sc.surfaces.push_back(Surface::make_plane({0, 0, cfg.gap}, Dir3(0, 0, -1)));
        sc.surfaces[0].name = "bottom";
        sc.surfaces[1].name = "top";
        sc.z_max = cfg.gap;
    } else {
        if (!(cfg.sphere_radius > 0.0))
            throw std::invalid_argument("build_scene: sphere radius must be positive");
        double R = cfg.sphere_radius;
        sc.surfaces.push_back(Surface::make_plane({0, 0, 0}, Dir3(0, 0, 1)));
        sc.surfaces.push_back(Surface::make_sphere({0, 0, cfg.gap + R}, R, true));
        sc.surfaces[0].name = "plate";
        sc.surfaces[1].name = "sphere";
        sc.r_max = 3.0 * R + cfg.gap;
        sc.z_max = cfg.gap + 3.0 * R;
    }
    return sc;
}

// A scene containing a single surface of `sc`, used for isolated-body
// reference integrals.
inline Scene single_body_scene(const Scene& sc, int surface_index) {
    Scene out;
    out.cfg = sc.cfg;
    out.scale = sc.scale;
    out.r_max = sc.r_max;
    out.z_max = sc.z_max;
    out.surfaces.push_back(sc.surfaces.at(surface_index));
    return out;
}

}  // namespace optcas
