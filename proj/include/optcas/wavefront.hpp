#pragma once

#include <cmath>
#include <optional>

#include "optcas/path.hpp"
#include "optcas/scene.hpp"
#include "optcas/surface.hpp"

namespace optcas {

// Symmetric 2x2 matrix (wavefront curvature, mirror shape operator).
struct Sym2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static Sym2 isotropic(double k) { return {k, 0.0, k}; }
    double det() const { return a11 * a22 - a12 * a12; }
    double trace() const { return a11 + a22; }
    // Eigenvalues in ascending order.
    void eigenvalues(double& lo, double& hi) const {
        double mean = 0.5 * (a11 + a22);
        double h = 0.5 * (a11 - a22);
        double d = std::sqrt(h * h + a12 * a12);
        lo = mean - d;
        hi = mean + d;
    }
    // Congruence by a 2x2 rotation [[c,-s],[s,c]] mapping old basis to new:
    // A' = R A R^T with R = [[c, s],[-s, c]] row convention handled by caller.
    Sym2 rotated(double c, double s) const {
        // new basis vectors expressed in old: e1' = c e1 + s e2, e2' = -s e1 + c e2
        double b11 = c * (c * a11 + s * a12) + s * (c * a12 + s * a22);
        double b12 = -s * (c * a11 + s * a12) + c * (c * a12 + s * a22);
        double b22 = -s * (-s * a11 + c * a12) + c * (-s * a12 + c * a22);
        return {b11, b12, b22};
    }
};

inline Sym2 operator+(const Sym2& a, const Sym2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
}

// Wavefront along a ray: curvature matrix Q in an orthonormal frame
// transverse to the ray (positive eigenvalue = diverging, radius 1/q grows
// with propagation) plus accumulated arc length.
struct WavefrontState {
    Sym2 Q;
    double s = 0.0;
};

struct PropagateResult {
    WavefrontState state;
    double area_factor = 1.0;  // cross-section area ratio over the flight
    bool caustic = false;      // a principal radius passed through zero
};

// Free flight over dist: radii 1/q grow by dist; Q' = Q (I + dist Q)^{-1}.
inline PropagateResult propagate_free(const WavefrontState& w, double dist) {
    PropagateResult out;
    double lo, hi;
    w.Q.eigenvalues(lo, hi);
    double f1 = 1.0 + dist * lo;
    double f2 = 1.0 + dist * hi;
    out.caustic = (f1 <= 1e-12) || (f2 <= 1e-12);
    double det_m = f1 * f2;
    out.area_factor = det_m;
    if (!out.caustic) {
        double dq = w.Q.det();
        out.state.Q = {(w.Q.a11 + dist * dq) / det_m, w.Q.a12 / det_m,
                       (w.Q.a22 + dist * dq) / det_m};
    }
    out.state.s = w.s + dist;
    return out;
}

// Specular reflection of the wavefront. Q must be expressed in the incidence
// frame: axis 1 in the plane of incidence, axis 2 perpendicular to it. K is
// the mirror shape operator in the matching surface tangent basis (axis 1 =
// in-plane tangent, axis 2 shared). cos_theta = cosine of incidence angle.
// The in-plane curvature picks up 2 K11 / cos(theta), the transverse one
// 2 K22 cos(theta).
inline WavefrontState reflect_wavefront(const WavefrontState& w, double cos_theta,
                                        const Sym2& K) {
    if (!(cos_theta > 0.0)) throw std::invalid_argument("reflect_wavefront: ray leaves surface");
    WavefrontState out = w;
    out.Q.a11 += 2.0 * K.a11 / cos_theta;
    out.Q.a12 += 2.0 * K.a12;
    out.Q.a22 += 2.0 * K.a22 * cos_theta;
    return out;
}

struct EnlargementResult {
    double delta = 0.0;       // dOmega/dA of the closed path
    double sqrt_delta = 0.0;
    bool caustic = false;
    bool ok = false;
};

// Enlargement factor by propagating a unit point source through the path:
// area per solid angle A = s1^2 * prod_k det(I + s_k Q_k); Delta = 1/A.
inline EnlargementResult enlargement_factor_propagated(const Scene& sc, const OpticalPath& path) {
    EnlargementResult out;
    const int n = path.seq.n;
    if (n < 1 || !(path.length > 0.0)) return out;

    Vec3 from = path.base;
    Vec3 dir = normalized(path.node[0] - from);
    double s1 = norm(path.node[0] - from);
    double area = s1 * s1;
    WavefrontState w{Sym2::isotropic(1.0 / s1), s1};
    // carry frame: (c1, c2) orthonormal, both transverse to dir
    Vec3 c1 = any_orthogonal(dir);
    Vec3 c2 = cross(dir, c1);
    bool isotropic_carry = true;  // first-segment Q is basis-free

    for (int k = 0; k < n; ++k) {
        const Vec3& y = path.node[k];
        const Surface& surf = sc.surfaces[path.seq.surf[k]];
        Vec3 nrm = normal_at(surf, y);
        double mu = -dot(dir, nrm);
        if (!(mu > 0.0)) return out;

        Vec3 x2;  // perpendicular to the plane of incidence
        Vec3 sxn = cross(nrm, dir);
        double sin_theta = norm(sxn);
        if (sin_theta > 1e-12)
            x2 = sxn / sin_theta;
        else
            x2 = any_orthogonal(nrm);
        Vec3 x1_in = cross(dir, x2);

        if (!isotropic_carry) {
            double c = dot(x1_in, c1);
            double s = dot(x1_in, c2);
            w.Q = w.Q.rotated(c, s);
            // the carry frame is right-handed about the ray, the incidence
            // frame left-handed; the improper change of basis flips a12
            w.Q.a12 = -w.Q.a12;
        }

        Sym2 K{0, 0, 0};
        if (surf.kind == SurfaceKind::sphere) {
            double kk = (surf.vacuum_outside ? 1.0 : -1.0) / surf.radius;
            K = Sym2::isotropic(kk);
        }
        w = reflect_wavefront(w, mu, K);
        isotropic_carry = false;

        Vec3 dir_out = dir + 2.0 * mu * nrm;
        dir_out = normalized(dir_out);
        c1 = cross(x2, dir_out);
        c2 = x2;
        dir = dir_out;

        const Vec3& next = (k == n - 1) ? path.base : path.node[k + 1];
        double seg = norm(next - y);
        PropagateResult pr = propagate_free(w, seg);
        if (pr.caustic) {
            out.caustic = true;
            return out;
        }
        area *= pr.area_factor;
        w = pr.state;
    }

    if (!(area > 0.0)) {
        out.caustic = true;
        return out;
    }
    out.delta = 1.0 / area;
    out.sqrt_delta = std::sqrt(out.delta);
    out.ok = true;
    return out;
}

namespace detail {

// Trace a ray through the path's reflection sequence and return the point
// reached after total arc length `total`. Surfaces are intersected in
// sequence order (nearest positive root).
inline std::optional<Vec3> trace_sequence(const Scene& sc, const ReflectionSequence& seq,
                                          const Vec3& origin, Dir3 dir, double total,
                                          double t_min) {
    Vec3 p = origin;
    double arc = 0.0;
    for (int k = 0; k < seq.n; ++k) {
        const Surface& surf = sc.surfaces[seq.surf[k]];
        auto t = ray_surface_t(surf, p, dir, t_min);
        if (!t) return std::nullopt;
        p = p + *t * dir.vec();
        arc += *t;
        Vec3 nrm = normal_at(surf, p);
        if (dot(dir, nrm) >= 0.0) return std::nullopt;
        dir = reflect(dir, Dir3(nrm));
    }
    return p + (total - arc) * dir.vec();
}

}  // namespace detail

// Independent enlargement factor from a finite-difference ray pencil: tilt
// the launch direction by +-h about two transverse axes, trace through the
// sequence, measure transverse arrival displacements at fixed total arc
// length, and Richardson-extrapolate the 2x2 Jacobian. The step is refined
// until two successive levels agree; near-grazing bounces need small steps.
inline EnlargementResult enlargement_factor_fd(const Scene& sc, const OpticalPath& path,
                                               double h = 1e-4) {
    EnlargementResult out;
    const int n = path.seq.n;
    if (n < 1 || !(path.length > 0.0)) return out;

    const Vec3& x = path.base;
    Vec3 d0 = normalized(path.node[0] - x);
    Vec3 b1 = any_orthogonal(d0);
    Vec3 b2 = cross(d0, b1);
    const double t_min = 1e-12 * sc.scale;
    const double total = path.length;

    // arrival frame: transverse to the final central direction
    Vec3 df = normalized(x - path.node[n - 1]);
    Vec3 f1 = any_orthogonal(df);
    Vec3 f2 = cross(df, f1);

    auto endpoint = [&](double alpha, double beta) -> std::optional<Vec3> {
        Vec3 d = d0 + alpha * b1 + beta * b2;
        return detail::trace_sequence(sc, path.seq, x, Dir3(d), total, t_min);
    };

    auto jacobian = [&](double step, double jj[4]) -> bool {
        auto pa = endpoint(step, 0.0), ma = endpoint(-step, 0.0);
        auto pb = endpoint(0.0, step), mb = endpoint(0.0, -step);
        if (!pa || !ma || !pb || !mb) return false;
        Vec3 da = (*pa - *ma) / (2.0 * step);
        Vec3 db = (*pb - *mb) / (2.0 * step);
        jj[0] = dot(da, f1);
        jj[1] = dot(db, f1);
        jj[2] = dot(da, f2);
        jj[3] = dot(db, f2);
        return true;
    };

    auto level = [&](double step) -> std::optional<double> {
        double j1[4], j2[4], j4[4];
        if (!jacobian(step, j1) || !jacobian(0.5 * step, j2) || !jacobian(0.25 * step, j4))
            return std::nullopt;
        double j[4];
        for (int i = 0; i < 4; ++i) {
            double r12 = (4.0 * j2[i] - j1[i]) / 3.0;
            double r24 = (4.0 * j4[i] - j2[i]) / 3.0;
            j[i] = (16.0 * r24 - r12) / 15.0;
        }
        double det = j[0] * j[3] - j[1] * j[2];
        if (!(std::fabs(det) > 0.0)) return std::nullopt;
        return 1.0 / std::fabs(det);
    };

    double prev = 0.0;
    bool have_prev = false;
    double best = 0.0, best_gap = 1e300;
    for (int attempt = 0; attempt < 6; ++attempt, h *= 0.25) {
        auto d = level(h);
        if (!d) continue;
        if (have_prev) {
            double gap = std::fabs(*d - prev) / std::fabs(*d);
            if (gap < best_gap) {
                best_gap = gap;
                best = *d;
            }
            if (gap < 3e-8) break;
        }
        prev = *d;
        have_prev = true;
    }
    if (best_gap < 1e-4) {
        out.delta = best;
        out.sqrt_delta = std::sqrt(out.delta);
        out.ok = true;
    }
    return out;
}

}  // namespace optcas
