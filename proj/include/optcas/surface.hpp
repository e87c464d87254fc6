#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "optcas/vec.hpp"

namespace optcas {

enum class SurfaceKind { plane, sphere };

struct ChartPoint {
    double u = 0.0;
    double v = 0.0;
};

// Local second-order data at a surface point: unit normal into the vacuum,
// an orthonormal tangent basis, and the shape operator in that basis
// (positive curvature = surface convex toward the vacuum side).
struct ShapeData {
    Vec3 normal;
    Vec3 t1;
    Vec3 t2;
    double k11 = 0.0;
    double k12 = 0.0;
    double k22 = 0.0;
};

struct Surface {
    SurfaceKind kind = SurfaceKind::plane;
    std::string name = "surface";

    // plane: p = base + u*e1 + v*e2, normal into the vacuum.
    // extent_u/extent_v are full side lengths; infinity = unbounded.
    Vec3 base;
    Vec3 normal{0, 0, 1};
    Vec3 e1{1, 0, 0};
    Vec3 e2{0, 1, 0};
    double extent_u = std::numeric_limits<double>::infinity();
    double extent_v = std::numeric_limits<double>::infinity();

    // sphere: chart is (u, v) = (polar, azimuth) about +z through the center.
    Vec3 center;
    double radius = 1.0;
    bool vacuum_outside = true;

    static Surface make_plane(const Vec3& base, const Dir3& normal,
                              double extent_u = std::numeric_limits<double>::infinity(),
                              double extent_v = std::numeric_limits<double>::infinity()) {
        Surface s;
        s.kind = SurfaceKind::plane;
        s.base = base;
        s.normal = normal.vec();
        s.e1 = any_orthogonal(s.normal);
        s.e2 = cross(s.normal, s.e1);
        if (!(extent_u > 0.0) || !(extent_v > 0.0))
            throw std::invalid_argument("make_plane: extents must be positive");
        s.extent_u = extent_u;
        s.extent_v = extent_v;
        return s;
    }

    static Surface make_sphere(const Vec3& center, double radius, bool vacuum_outside = true) {
        if (!(radius > 0.0)) throw std::invalid_argument("make_sphere: radius must be positive");
        Surface s;
        s.kind = SurfaceKind::sphere;
        s.center = center;
        s.radius = radius;
        s.vacuum_outside = vacuum_outside;
        return s;
    }
};

inline Vec3 chart_to_point(const Surface& s, const ChartPoint& c) {
    if (s.kind == SurfaceKind::plane) {
        if (std::fabs(c.u) > 0.5 * s.extent_u || std::fabs(c.v) > 0.5 * s.extent_v)
            throw std::domain_error("chart_to_point: chart value outside plane extent");
        return s.base + c.u * s.e1 + c.v * s.e2;
    }
    if (c.u < 0.0 || c.u > M_PI || c.v < -M_PI || c.v > M_PI)
        throw std::domain_error("chart_to_point: chart value outside sphere range");
    double su = std::sin(c.u);
    return s.center + s.radius * Vec3{su * std::cos(c.v), su * std::sin(c.v), std::cos(c.u)};
}

inline ChartPoint point_to_chart(const Surface& s, const Vec3& p) {
    if (s.kind == SurfaceKind::plane) {
        Vec3 d = p - s.base;
        return {dot(d, s.e1), dot(d, s.e2)};
    }
    Vec3 d = (p - s.center) / s.radius;
    double cu = std::clamp(d.z, -1.0, 1.0);
    double u = std::acos(cu);
    double v = (std::fabs(d.x) + std::fabs(d.y) > 0.0) ? std::atan2(d.y, d.x) : 0.0;
    return {u, v};
}

inline Vec3 normal_at(const Surface& s, const Vec3& p) {
    if (s.kind == SurfaceKind::plane) return s.normal;
    Vec3 out = normalized(p - s.center);
    return s.vacuum_outside ? out : -out;
}

inline ShapeData shape_at(const Surface& s, const Vec3& p) {
    ShapeData d;
    d.normal = normal_at(s, p);
    d.t1 = any_orthogonal(d.normal);
    d.t2 = cross(d.normal, d.t1);
    if (s.kind == SurfaceKind::sphere) {
        double k = (s.vacuum_outside ? 1.0 : -1.0) / s.radius;
        d.k11 = k;
        d.k22 = k;
    }
    return d;
}

// true if p lies on the surface (and inside its extent) within tol.
inline bool on_surface(const Surface& s, const Vec3& p, double tol) {
    if (s.kind == SurfaceKind::plane) {
        if (std::fabs(dot(p - s.base, s.normal)) > tol) return false;
        ChartPoint c = point_to_chart(s, p);
        return std::fabs(c.u) <= 0.5 * s.extent_u + tol && std::fabs(c.v) <= 0.5 * s.extent_v + tol;
    }
    return std::fabs(norm(p - s.center) - s.radius) <= tol;
}

// Specular reflection of an incoming direction. The ray must approach the
// surface (d.n < 0).
inline Dir3 reflect(const Dir3& d, const Dir3& n) {
    double dn = dot(d, n);
    if (dn >= 0.0) throw std::invalid_argument("reflect: ray leaves the surface");
    return Dir3(d.vec() - 2.0 * dn * n.vec());
}

struct Hit {
    int surface = -1;
    double t = 0.0;
    Vec3 point;
};

// Nearest intersection of the ray origin + t*dir (t > t_min) with one surface.
inline std::optional<double> ray_surface_t(const Surface& s, const Vec3& origin, const Dir3& dir,
                                           double t_min) {
    if (s.kind == SurfaceKind::plane) {
        double denom = dot(dir, s.normal);
        if (std::fabs(denom) < 1e-300) return std::nullopt;
        double t = dot(s.base - origin, s.normal) / denom;
        if (t <= t_min) return std::nullopt;
        Vec3 p = origin + t * dir.vec();
        ChartPoint c = point_to_chart(s, p);
        if (std::fabs(c.u) > 0.5 * s.extent_u || std::fabs(c.v) > 0.5 * s.extent_v)
            return std::nullopt;
        return t;
    }
    Vec3 oc = origin - s.center;
    double b = dot(oc, dir);
    double c0 = norm2(oc) - s.radius * s.radius;
    double disc = b * b - c0;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double q = -(b + std::copysign(sq, b));
    double t1 = q;
    double t2 = (q != 0.0) ? c0 / q : -b;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > t_min) return t1;
    if (t2 > t_min) return t2;
    return std::nullopt;
}

inline std::optional<Hit> first_hit(std::span<const Surface> surfaces, const Vec3& origin,
                                    const Dir3& dir, double t_min = 0.0) {
    std::optional<Hit> best;
    for (int i = 0; i < static_cast<int>(surfaces.size()); ++i) {
        auto t = ray_surface_t(surfaces[i], origin, dir, t_min);
        if (t && (!best || *t < best->t)) best = Hit{i, *t, origin + *t * dir.vec()};
    }
    return best;
}

}  // namespace optcas
