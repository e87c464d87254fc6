#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "optcas/scene.hpp"
#include "optcas/surface.hpp"

namespace optcas {

inline constexpr int kMaxReflections = 12;

// A reflection class: ordered list of surface indices, no two consecutive
// entries equal. Closed paths of even order are counted once with
// multiplicity 2 (the reversed traversal is the same loop); odd orders give
// one sequence per starting surface with multiplicity 1.
struct ReflectionSequence {
    std::array<std::int8_t, kMaxReflections> surf{};
    int n = 0;
    int multiplicity = 1;

    int order() const { return n; }
    std::string label(const Scene& sc) const {
        std::string out;
        for (int i = 0; i < n; ++i) {
            if (i) out += '-';
            out += sc.surfaces[surf[i]].name;
        }
        return out;
    }
};

inline std::vector<ReflectionSequence> enumerate_sequences(const Scene& sc, int max_reflections) {
    if (max_reflections < 1 || max_reflections > kMaxReflections)
        throw std::invalid_argument("enumerate_sequences: max_reflections out of range");
    std::vector<ReflectionSequence> out;
    int nsurf = static_cast<int>(sc.surfaces.size());
    for (int n = 1; n <= max_reflections; ++n) {
        if (nsurf == 1) {
            if (n > 1) break;  // a lone convex/flat body supports only one bounce
            ReflectionSequence s;
            s.n = 1;
            s.surf[0] = 0;
            out.push_back(s);
            continue;
        }
        if (n % 2 == 1) {
            for (int start = 0; start < 2; ++start) {
                ReflectionSequence s;
                s.n = n;
                s.multiplicity = 1;
                for (int i = 0; i < n; ++i) s.surf[i] = static_cast<std::int8_t>((start + i) % 2);
                out.push_back(s);
            }
        } else {
            ReflectionSequence s;
            s.n = n;
            s.multiplicity = 2;
            for (int i = 0; i < n; ++i) s.surf[i] = static_cast<std::int8_t>(i % 2);
            out.push_back(s);
        }
    }
    return out;
}

enum class PathStatus {
    valid,
    no_convergence,
    off_surface,
    shadowed,
    grazing,
    penetrates,
};

inline const char* to_string(PathStatus s) {
    switch (s) {
        case PathStatus::valid: return "valid";
        case PathStatus::no_convergence: return "no_convergence";
        case PathStatus::off_surface: return "off_surface";
        case PathStatus::shadowed: return "shadowed";
        case PathStatus::grazing: return "grazing";
        case PathStatus::penetrates: return "penetrates";
    }
    return "?";
}

struct OpticalPath {
    ReflectionSequence seq;
    Vec3 base;
    std::array<Vec3, kMaxReflections> node{};
    double length = 0.0;
    double residual = 0.0;  // stationarity measure, dimensionless
    double min_cos_incidence = 1.0;
    int iterations = 0;
    PathStatus status = PathStatus::no_convergence;
};

namespace detail {

inline Vec3 project_to_surface(const Surface& s, const Vec3& p) {
    if (s.kind == SurfaceKind::plane) return p - dot(p - s.base, s.normal) * s.normal;
    Vec3 d = p - s.center;
    double n = norm(d);
    if (n < 1e-300) return s.center + Vec3{s.radius, 0, 0};
    return s.center + (s.radius / n) * d;
}

// Tangential stationarity residual of the length functional at the current
// nodes, expressed in the given per-node tangent bases.
inline void length_gradient(const ReflectionSequence& seq, const Vec3& x,
                            const std::array<Vec3, kMaxReflections>& y,
                            const std::array<Vec3, kMaxReflections>& t1,
                            const std::array<Vec3, kMaxReflections>& t2, double* r) {
    int n = seq.n;
    for (int i = 0; i < n; ++i) {
        const Vec3& prev = (i == 0) ? x : y[i - 1];
        const Vec3& next = (i == n - 1) ? x : y[i + 1];
        Vec3 g = normalized(y[i] - prev) + normalized(y[i] - next);
        r[2 * i] = dot(g, t1[i]);
        r[2 * i + 1] = dot(g, t2[i]);
    }
}

// Gaussian elimination with partial pivoting; returns false if singular.
inline bool solve_dense(int m, double* a, double* b) {
    constexpr int kMax = 2 * kMaxReflections;
    int piv[kMax];
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int col = 0; col < m; ++col) {
        int best = col;
        double bv = std::fabs(a[piv[col] * m + col]);
        for (int row = col + 1; row < m; ++row) {
            double v = std::fabs(a[piv[row] * m + col]);
            if (v > bv) {
                bv = v;
                best = row;
            }
        }
        if (bv < 1e-300) return false;
        std::swap(piv[col], piv[best]);
        double diag = a[piv[col] * m + col];
        for (int row = col + 1; row < m; ++row) {
            double f = a[piv[row] * m + col] / diag;
            if (f == 0.0) continue;
            for (int k = col; k < m; ++k) a[piv[row] * m + k] -= f * a[piv[col] * m + k];
            b[piv[row]] -= f * b[piv[col]];
        }
    }
    double xsol[kMax];
    for (int col = m - 1; col >= 0; --col) {
        double s = b[piv[col]];
        for (int k = col + 1; k < m; ++k) s -= a[piv[col] * m + k] * xsol[k];
        xsol[col] = s / a[piv[col] * m + col];
    }
    for (int i = 0; i < m; ++i) b[i] = xsol[i];
    return true;
}

inline double max_abs(const double* r, int m) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v = std::max(v, std::fabs(r[i]));
    return v;
}

}  // namespace detail

// Stationary closed path of the reflection sequence through x. Solves only;
// obstruction checks live in validate_path. Nodes are initialized at the
// perpendicular/nearest feet of x on each surface, or from a caller-provided
// seed (the converged nodes of a nearby path) when continuation is wanted.
inline OpticalPath find_closed_path(const Scene& sc, const Vec3& x, const ReflectionSequence& seq,
                                    const std::array<Vec3, kMaxReflections>* seed = nullptr) {
    const double kResidualTol = 1e-10 * sc.scale;
    constexpr int kMaxIters = 200;
    constexpr double kGrazingCos = 1e-6;

    OpticalPath path;
    path.seq = seq;
    path.base = x;
    const int n = seq.n;
    const int m = 2 * n;

    std::array<Vec3, kMaxReflections> y{};
    for (int i = 0; i < n; ++i)
        y[i] = detail::project_to_surface(sc.surfaces[seq.surf[i]], seed ? (*seed)[i] : x);

    std::array<Vec3, kMaxReflections> t1{}, t2{};
    double r[2 * kMaxReflections];
    double rtrial[2 * kMaxReflections];
    double jac[2 * kMaxReflections * 2 * kMaxReflections];
    double step[2 * kMaxReflections];
    const double h = 1e-7 * sc.scale;
    const double max_step = 1.0 * sc.scale;

    auto fill_bases = [&]() {
        for (int i = 0; i < n; ++i) {
            Vec3 nrm = normal_at(sc.surfaces[seq.surf[i]], y[i]);
            t1[i] = any_orthogonal(nrm);
            t2[i] = cross(nrm, t1[i]);
        }
    };

    bool converged = false;
    int iter = 0;
    try {
        fill_bases();
        detail::length_gradient(seq, x, y, t1, t2, r);
        double rn = detail::max_abs(r, m);
        for (; iter < kMaxIters; ++iter) {
            if (rn < kResidualTol) {
                converged = true;
                break;
            }
            // the residual is the gradient in the local tangent frames, which
            // rotate with the nodes; differentiate frames along too (parallel
            // transport of the frame onto the perturbed tangent plane), or the
            // normal component of the length gradient spoils the Jacobian on
            // curved surfaces and convergence degrades to a slow linear rate
            std::array<Vec3, kMaxReflections> yp = y;
            for (int k = 0; k < m; ++k) {
                int i = k / 2;
                const Vec3& dirk = (k % 2 == 0) ? t1[i] : t2[i];
                yp[i] = detail::project_to_surface(sc.surfaces[seq.surf[i]], y[i] + h * dirk);
                Vec3 save1 = t1[i], save2 = t2[i];
                Vec3 nrm = normal_at(sc.surfaces[seq.surf[i]], yp[i]);
                t1[i] = normalized(save1 - dot(save1, nrm) * nrm);
                t2[i] = normalized(save2 - dot(save2, nrm) * nrm);
                detail::length_gradient(seq, x, yp, t1, t2, rtrial);
                t1[i] = save1;
                t2[i] = save2;
                for (int row = 0; row < m; ++row) jac[row * m + k] = (rtrial[row] - r[row]) / h;
                yp[i] = y[i];
            }
            for (int i = 0; i < m; ++i) step[i] = -r[i];
            if (!detail::solve_dense(m, jac, step)) break;
            double sn = detail::max_abs(step, m);
            if (sn > max_step)
                for (int i = 0; i < m; ++i) step[i] *= max_step / sn;

            double alpha = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 24; ++ls) {
                std::array<Vec3, kMaxReflections> yt = y;
                for (int i = 0; i < n; ++i) {
                    Vec3 d = alpha * (step[2 * i] * t1[i] + step[2 * i + 1] * t2[i]);
                    yt[i] = detail::project_to_surface(sc.surfaces[seq.surf[i]], y[i] + d);
                }
                std::array<Vec3, kMaxReflections> s1 = t1, s2 = t2;
                y.swap(yt);
                fill_bases();
                detail::length_gradient(seq, x, y, t1, t2, rtrial);
                double rt = detail::max_abs(rtrial, m);
                if (rt < rn || rt < kResidualTol) {
                    std::copy(rtrial, rtrial + m, r);
                    rn = rt;
                    accepted = true;
                    break;
                }
                y.swap(yt);  // revert
                t1 = s1;
                t2 = s2;
                alpha *= 0.5;
            }
            if (!accepted) break;
        }
    } catch (const std::invalid_argument&) {
        converged = false;  // degenerate geometry (zero-length segment)
    }

    path.iterations = iter;
    for (int i = 0; i < n; ++i) path.node[i] = y[i];

    double len = 0.0;
    Vec3 prev = x;
    double min_cos = 1.0;
    for (int i = 0; i <= n; ++i) {
        const Vec3& next = (i == n) ? x : y[i];
        len += norm(next - prev);
        prev = next;
    }
    for (int i = 0; i < n; ++i) {
        const Vec3& from = (i == 0) ? x : y[i - 1];
        Vec3 seg = y[i] - from;
        double sl = norm(seg);
        if (sl <= 0.0) {
            converged = false;
            break;
        }
        Vec3 nrm = normal_at(sc.surfaces[seq.surf[i]], y[i]);
        min_cos = std::min(min_cos, -dot(seg, nrm) / sl);
    }
    path.length = len;
    path.min_cos_incidence = min_cos;
    if (converged) {
        fill_bases();
        detail::length_gradient(seq, x, y, t1, t2, r);
        path.residual = detail::max_abs(r, m);
        path.status = (min_cos <= 1e-6) ? PathStatus::grazing : PathStatus::valid;
    } else {
        path.residual = std::numeric_limits<double>::quiet_NaN();
        path.status = PathStatus::no_convergence;
    }
    return path;
}

// Geometric validity of a solved path: base point in the vacuum domain, every
// node on (and within the extent of) its surface, no grazing incidence, and
// no segment blocked by any body.
inline PathStatus validate_path(const Scene& sc, const OpticalPath& path) {
    if (path.status == PathStatus::no_convergence || path.status == PathStatus::grazing)
        return path.status;
    const double tol = 1e-7 * sc.scale;
    if (!sc.contains(path.base)) return PathStatus::penetrates;
    const int n = path.seq.n;
    for (int i = 0; i < n; ++i)
        if (!on_surface(sc.surfaces[path.seq.surf[i]], path.node[i], tol))
            return PathStatus::off_surface;
    for (int i = 0; i <= n; ++i) {
        const Vec3& p = (i == 0) ? path.base : path.node[i - 1];
        const Vec3& q = (i == n) ? path.base : path.node[i];
        Vec3 seg = q - p;
        double L = norm(seg);
        if (L < 1e-12 * sc.scale) continue;
        auto hit = first_hit(sc.surfaces, p, Dir3(seg), 1e-9 * sc.scale);
        if (i == n) {
            if (hit && hit->t < L - tol) return PathStatus::shadowed;
        } else {
            if (!hit || hit->surface != path.seq.surf[i] || std::fabs(hit->t - L) > tol)
                return PathStatus::shadowed;
        }
    }
    return PathStatus::valid;
}

inline OpticalPath solve_and_validate(const Scene& sc, const Vec3& x,
                                      const ReflectionSequence& seq,
                                      const std::array<Vec3, kMaxReflections>* seed = nullptr) {
    OpticalPath p = find_closed_path(sc, x, seq, seed);
    if (p.status == PathStatus::valid) p.status = validate_path(sc, p);
    if (seed || sc.cfg.kind == SceneKind::parallel_plates) return p;
    if (p.status != PathStatus::no_convergence && p.status != PathStatus::grazing) return p;
    // some classes hold several stationary paths; when the default start
    // lands on a grazing sibling or fails to converge, retry from the feet
    // of the bodies' closest-approach segment, which sits in the basin of
    // the retraced gap-crossing branch
    std::array<Vec3, kMaxReflections> feet{};
    for (int i = 0; i < seq.n; ++i) {
        const Surface& s = sc.surfaces[seq.surf[i]];
        feet[i] = (s.kind == SurfaceKind::plane) ? Vec3{0.0, 0.0, 0.0}
                                                 : Vec3{0.0, 0.0, sc.cfg.gap};
    }
    OpticalPath q = find_closed_path(sc, x, seq, &feet);
    if (q.status == PathStatus::valid) q.status = validate_path(sc, q);
    return (q.status == PathStatus::valid) ? q : p;
}

}  // namespace optcas
