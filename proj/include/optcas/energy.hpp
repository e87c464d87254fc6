#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "optcas/bessel.hpp"
#include "optcas/montecarlo.hpp"
#include "optcas/path.hpp"
#include "optcas/quadrature.hpp"
#include "optcas/scene.hpp"
#include "optcas/wavefront.hpp"

namespace optcas {

enum class BoundaryCondition { dirichlet, neumann };

struct PhysicalParams {
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    double mass = 0.0;      // hbar = c = 1; inverse length
    double epsilon = 0.01;  // point-splitting cutoff for the n=1 class
};

inline void check_physical_params(const PhysicalParams& p) {
    if (p.mass < 0.0) throw std::invalid_argument("PhysicalParams: mass >= 0");
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("PhysicalParams: epsilon > 0");
}

// Per-class prefactor: -(1/2pi^2) * M_n * (-1)^n for Dirichlet; Neumann
// drops the (-1)^n. Even classes come out negative, Dirichlet odd positive.
inline double class_weight(const ReflectionSequence& seq, BoundaryCondition bc) {
    double sign = 1.0;
    if (bc == BoundaryCondition::dirichlet && seq.n % 2 != 0) sign = -1.0;
    return -sign * static_cast<double>(seq.multiplicity) / (2.0 * M_PI * M_PI);
}

// Point-split radial kernel. Massless: sqrt(D) * l / (l^2+eps^2)^2, which is
// sqrt(D)/l^3 away from contact. Massive: (m^2/2) sqrt(D) l K2(m l_e)/l_e^2
// with l_e = sqrt(l^2+eps^2); its m->0 limit is the massless kernel exactly.
inline double regulated_kernel(double ell, double sqrt_delta, const PhysicalParams& pp) {
    double le2 = ell * ell + pp.epsilon * pp.epsilon;
    if (pp.mass > 0.0) {
        double le = std::sqrt(le2);
        return sqrt_delta * ell * (0.5 * pp.mass * pp.mass) * bessel_k2(pp.mass * le) / le2;
    }
    return sqrt_delta * ell / (le2 * le2);
}

// Unweighted integrand of one valid path at its base point.
inline std::optional<double> pointwise_integrand(const Scene& sc, const OpticalPath& path,
                                                 const PhysicalParams& pp) {
    EnlargementResult enl = enlargement_factor_propagated(sc, path);
    if (!enl.ok) return std::nullopt;  // caustic or degenerate: excluded
    return regulated_kernel(path.length, enl.sqrt_delta, pp);
}

struct Contribution {
    ReflectionSequence seq;
    double value = 0.0;  // weighted regulated scene integral
    double error = 0.0;
    bool divergent = false;  // n = 1 carries the eps-divergent surface term
    double finite_value = 0.0;  // a-dependent part (== value for n >= 2)
    double finite_error = 0.0;
    std::int64_t n_evaluated = 0;
    std::int64_t n_excluded = 0;
    long long n_no_convergence = 0;
    long long n_off_surface = 0;
    long long n_shadowed = 0;
    long long n_grazing = 0;
    long long n_penetrates = 0;
    long long n_caustic = 0;
    bool converged = true;
};

// Axis-aligned sampling box enclosing every path domain of the scene.
inline Box scene_box(const Scene& sc) {
    if (sc.cfg.kind == SceneKind::parallel_plates) {
        double h = 0.5 * sc.cfg.side;
        return {{-h, -h, 0.0}, {h, h, sc.cfg.gap}};
    }
    return {{-sc.r_max, -sc.r_max, 0.0}, {sc.r_max, sc.r_max, sc.z_max}};
}

namespace detail {

struct StatusTally {
    std::atomic<long long> no_convergence{0};
    std::atomic<long long> off_surface{0};
    std::atomic<long long> shadowed{0};
    std::atomic<long long> grazing{0};
    std::atomic<long long> penetrates{0};
    std::atomic<long long> caustic{0};

    void bump(PathStatus s) {
        switch (s) {
            case PathStatus::no_convergence: ++no_convergence; break;
            case PathStatus::off_surface: ++off_surface; break;
            case PathStatus::shadowed: ++shadowed; break;
            case PathStatus::grazing: ++grazing; break;
            case PathStatus::penetrates: ++penetrates; break;
            default: break;
        }
    }
};

// Self-integrand of an isolated plane at normal distance `dist`.
inline double plane_self_kernel(double dist, const PhysicalParams& pp) {
    double ell = 2.0 * dist;
    return regulated_kernel(ell, 1.0 / ell, pp);
}

// Self-integrand of an isolated sphere at outside distance `dist`.
inline double sphere_self_kernel(double dist, double R, const PhysicalParams& pp) {
    double ell = 2.0 * dist;
    double sd = R / (2.0 * dist * (R + dist));
    return regulated_kernel(ell, sd, pp);
}

// integral_h^inf plane_self_kernel(z) dz via z = h/(1-t).
inline double plane_self_tail(double h, const PhysicalParams& pp, double tol) {
    auto f = [&](double t) -> double {
        if (t >= 1.0 - 1e-13) return 0.0;
        double z = h / (1.0 - t);
        return plane_self_kernel(z, pp) * h / ((1.0 - t) * (1.0 - t));
    };
    return integrate_1d(f, 0.0, 1.0, tol);
}

}  // namespace detail

// Complement integral of the one-reflection class: the isolated-body
// self-integrand over the region where the isolated path exists but the
// in-scene path does not. Subtracting it from the isolated-body integral
// leaves the a-dependent finite part; see first_order_finite.
inline double first_order_complement_integral(const Scene& sc, const ReflectionSequence& seq,
                                              const PhysicalParams& pp) {
    if (seq.n != 1) throw std::invalid_argument("first_order_complement_integral: n must be 1");
    const Surface& surf = sc.surfaces[seq.surf[0]];
    if (sc.cfg.kind == SceneKind::parallel_plates) {
        // other plate blocks everything beyond distance a
        double a = sc.cfg.gap, S = sc.area();
        double tol = 1e-12 * S / (a * a * a);
        return S * detail::plane_self_tail(a, pp, tol);
    }
    double R = sc.cfg.sphere_radius, a = sc.cfg.gap, zc = a + R;
    if (surf.kind == SurfaceKind::plane) {
        // sphere shadow: r <= R, z >= zc - sqrt(R^2 - r^2); r = R sin(phi)
        double tol_in = 1e-13 / (a * a * a);
        auto ring = [&](double phi) -> double {
            double h = zc - R * std::cos(phi);
            return 2.0 * M_PI * R * std::sin(phi) * R * std::cos(phi) *
                   detail::plane_self_tail(h, pp, tol_in);
        };
        return integrate_1d(ring, 0.0, 0.5 * M_PI, 1e-11 * R * R / (a * a * a));
    }
    // plate blocks the half-space z < 0; reduce over spheres around the
    // center: area below the plate at center distance rho is 2 pi rho (rho - zc)
    auto shell = [&](double t) -> double {
        if (t >= 1.0 - 1e-13) return 0.0;
        double rho = zc / (1.0 - t);
        double jac = zc / ((1.0 - t) * (1.0 - t));
        return 2.0 * M_PI * rho * (rho - zc) * detail::sphere_self_kernel(rho - R, R, pp) * jac;
    };
    return integrate_1d(shell, 0.0, 1.0, 1e-11 * R / (a * a));
}

// a-dependent part of a one-reflection class: -(weight) * complement integral.
inline double first_order_finite(const Scene& sc, const ReflectionSequence& seq,
                                 const PhysicalParams& pp) {
    return -class_weight(seq, pp.bc) * first_order_complement_integral(sc, seq, pp);
}

// Monte Carlo energy contribution of one reflection class over the scene.
template <class ICfg = IntegratorConfig>
Contribution class_contribution(const Scene& sc, const ReflectionSequence& seq,
                                const PhysicalParams& pp, const ICfg& icfg) {
    check_physical_params(pp);
    detail::StatusTally tally;
    auto f = [&](const Vec3& p) -> std::optional<double> {
        if (!sc.in_bounding_region(p) || !sc.contains(p)) return std::nullopt;
        OpticalPath path = solve_and_validate(sc, p, seq);
        if (path.status != PathStatus::valid) {
            tally.bump(path.status);
            return std::nullopt;
        }
        auto v = pointwise_integrand(sc, path, pp);
        if (!v) ++tally.caustic;
        return v;
    };
    IntegralEstimate est = integrate_volume(f, scene_box(sc), icfg);

    double w = class_weight(seq, pp.bc);
    Contribution c;
    c.seq = seq;
    c.value = w * est.value;
    c.error = std::fabs(w) * est.std_error;
    c.divergent = (seq.n == 1);
    if (c.divergent) {
        c.finite_value = first_order_finite(sc, seq, pp);
        c.finite_error = 0.0;  // deterministic quadrature
    } else {
        c.finite_value = c.value;
        c.finite_error = c.error;
    }
    c.n_evaluated = est.n_evaluated;
    c.n_excluded = est.n_excluded;
    c.n_no_convergence = tally.no_convergence.load();
    c.n_off_surface = tally.off_surface.load();
    c.n_shadowed = tally.shadowed.load();
    c.n_grazing = tally.grazing.load();
    c.n_penetrates = tally.penetrates.load();
    c.n_caustic = tally.caustic.load();
    c.converged = est.converged;
    return c;
}

// Deterministic cross-check of class_contribution for axisymmetric scenes.
// The integrand jumps to zero across domain boundaries (shadowing, caustics,
// leaving the body), which stalls naive adaptive quadrature, so each ring
// first locates its validity boundaries in z by bisection and then applies
// adaptive quadrature on the smooth segments only.
inline double class_value_axisym(const Scene& sc, const ReflectionSequence& seq,
                                 const PhysicalParams& pp, double rel_tol = 1e-6) {
    if (!sc.axisymmetric())
        throw std::invalid_argument("class_value_axisym: scene is not axisymmetric");
    check_physical_params(pp);
    // cold-start solves can fail spuriously in a thin crust around a fold of
    // the path family; a retry seeded from the last converged path on the
    // same ring recovers those points
    std::array<Vec3, kMaxReflections> last_nodes{};
    bool have_last = false;
    auto eval = [&](double r, double z) -> std::optional<double> {
        Vec3 p{r, 0.0, z};
        if (!sc.contains(p)) return std::nullopt;
        OpticalPath path = solve_and_validate(sc, p, seq);
        if (path.status != PathStatus::valid && have_last)
            path = solve_and_validate(sc, p, seq, &last_nodes);
        if (path.status != PathStatus::valid) return std::nullopt;
        for (int i = 0; i < seq.n; ++i) last_nodes[i] = path.node[i];
        have_last = true;
        return pointwise_integrand(sc, path, pp);
    };

    const double z_max = sc.z_max;
    // probe layout: uniform plus a band clustered near the gap so thin-gap
    // scenes still register their validity sliver
    std::vector<double> probes;
    const int n_uniform = 96, n_band = 48;
    double band = std::min(3.0 * sc.cfg.gap, z_max);
    for (int i = 0; i <= n_uniform; ++i) probes.push_back(z_max * i / n_uniform);
    for (int i = 0; i <= n_band; ++i) probes.push_back(band * i / n_band);
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    // seg_floor <= 0 requests the probe-trapezoid estimate only (used for the
    // coarse scale-setting scan); otherwise each segment is refined to a
    // tolerance relative to its own rough magnitude, floored at seg_floor, so
    // thin-gap scenes with enormous local integrands are not over-resolved
    auto ring = [&](double r, double seg_floor, double seg_rel) -> double {
        have_last = false;
        std::vector<double> val(probes.size());
        std::vector<char> ok(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            auto v = eval(r, probes[i]);
            ok[i] = v.has_value();
            val[i] = v ? *v : 0.0;
        }
        double sum = 0.0;
        std::size_t i = 0;
        while (i < probes.size()) {
            if (!ok[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < probes.size() && ok[j + 1]) ++j;
            double zl = probes[i], zr = probes[j];
            // push the segment ends to the true boundaries
            if (i > 0) {
                double bad = probes[i - 1], good = zl;
                for (int it = 0; it < 50 && good - bad > 1e-13 * z_max; ++it) {
                    double m = 0.5 * (bad + good);
                    (eval(r, m) ? good : bad) = m;
                }
                zl = good;
            }
            if (j + 1 < probes.size()) {
                double good = zr, bad = probes[j + 1];
                for (int it = 0; it < 50 && bad - good > 1e-13 * z_max; ++it) {
                    double m = 0.5 * (bad + good);
                    (eval(r, m) ? good : bad) = m;
                }
                zr = good;
            }
            double rough_seg = 0.0;
            if (i == j) {
                rough_seg = val[i] * (zr - zl);
            } else {
                rough_seg = 0.5 * val[i] * (probes[i] - zl) + 0.5 * val[j] * (zr - probes[j]);
                for (std::size_t k = i; k < j; ++k)
                    rough_seg += 0.5 * (val[k] + val[k + 1]) * (probes[k + 1] - probes[k]);
            }
            if (seg_floor <= 0.0) {
                sum += rough_seg;
            } else if (zr > zl) {
                auto g = [&](double z) {
                    auto v = eval(r, z);
                    return v ? *v : 0.0;
                };
                double seg_tol = std::max(seg_floor, seg_rel * std::fabs(rough_seg));
                sum += integrate_1d(g, zl, zr, seg_tol, 18);
            }
            i = j + 1;
        }
        return 2.0 * M_PI * r * sum;
    };

    // coarse midpoint scan; sets the absolute tolerance scale and localizes
    // the radial support, which can be a narrow annulus near the gap
    const int G = 32;
    double dr = sc.r_max / G;
    std::vector<double> panel(G);
    double rough = 0.0, rough_abs = 0.0;
    for (int k = 0; k < G; ++k) {
        panel[k] = ring((k + 0.5) * dr, 0.0, 0.0) * dr;
        rough += panel[k];
        rough_abs += std::fabs(panel[k]);
    }
    double tol = rel_tol * std::max(std::fabs(rough), 1e-12);
    double seg_floor = 0.05 * tol / (2.0 * M_PI * sc.r_max * sc.r_max);
    double seg_rel = 0.2 * rel_tol;
    auto outer = [&](double r) { return ring(r, seg_floor, seg_rel); };
    // integrate panel by panel: a single adaptive pass over the full radial
    // range can declare convergence without ever sampling the support, and
    // the per-panel budgets keep the work where the integral actually lives
    double integral = 0.0;
    for (int k = 0; k < G; ++k) {
        double share = rough_abs > 0.0 ? std::fabs(panel[k]) / rough_abs : 1.0 / G;
        double tol_k = std::max(0.5 * tol * share, 0.02 * tol / G);
        integral += integrate_1d(outer, k * dr, (k + 1) * dr, tol_k, 18);
    }
    return class_weight(seq, pp.bc) * integral;
}

struct EnergyResult {
    int max_order = 0;
    std::vector<Contribution> classes;
    double finite_part = 0.0;  // sum of n>=2 values plus n=1 a-dependent parts
    double finite_error = 0.0;
    double divergent_constant = 0.0;  // n=1 raw minus its a-dependent part
    double divergent_error = 0.0;
    double even_sum = 0.0;
    double even_error = 0.0;
    double odd_finite_sum = 0.0;
    std::vector<double> cumulative_fraction;  // per order 1..max_order, of finite_part

    // fraction of the finite part carried by even classes of order <= n_max
    double even_fraction(int n_max) const {
        double s = 0.0;
        for (const auto& c : classes)
            if (c.seq.n % 2 == 0 && c.seq.n <= n_max) s += c.value;
        return s / finite_part;
    }
};

// Full assembly: every reflection class up to max_order, the sample budget
// split evenly across classes. The n=1 divergent constant is isolated and
// never added to the finite part.
inline EnergyResult total_energy(const Scene& sc, const PhysicalParams& pp, int max_order,
                                 const IntegratorConfig& icfg) {
    if (max_order < 2) throw std::invalid_argument("total_energy: max_order >= 2");
    auto seqs = enumerate_sequences(sc, max_order);
    IntegratorConfig per = icfg;
    per.samples = icfg.samples / static_cast<std::int64_t>(seqs.size());
    if (per.samples < 1000) per.samples = 1000;

    EnergyResult res;
    res.max_order = max_order;
    for (const auto& seq : seqs) res.classes.push_back(class_contribution(sc, seq, pp, per));

    double var_fin = 0.0, var_div = 0.0, var_even = 0.0;
    for (const auto& c : res.classes) {
        res.finite_part += c.finite_value;
        var_fin += c.finite_error * c.finite_error;
        if (c.divergent) {
            res.divergent_constant += c.value - c.finite_value;
            var_div += c.error * c.error;
        }
        if (c.seq.n % 2 == 0) {
            res.even_sum += c.value;
            var_even += c.error * c.error;
        } else if (!c.divergent) {
            res.odd_finite_sum += c.value;
        } else {
            res.odd_finite_sum += c.finite_value;
        }
    }
    res.finite_error = std::sqrt(var_fin);
    res.divergent_error = std::sqrt(var_div);
    res.even_error = std::sqrt(var_even);

    res.cumulative_fraction.assign(max_order, 0.0);
    for (int k = 1; k <= max_order; ++k) {
        double s = 0.0;
        for (const auto& c : res.classes)
            if (c.seq.n <= k) s += c.finite_value;
        res.cumulative_fraction[k - 1] = s / res.finite_part;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Spectral route: the same class energies from the oscillatory k-integral
// J(l) = lim_{eta->0} integral_0^inf k sqrt(k^2+m^2) sin(kl) e^(-eta k) dk,
// evaluated with a damping factor and Richardson extrapolation in eta
// (the expansion is in even powers). Massless limit: J = -2/l^3.

// Damped integral at fixed eta: half-period panels, compensated panel sum.
inline double spectral_j_damped(double ell, double m, double eta, double k_max = 0.0) {
    if (!(ell > 0.0) || !(eta > 0.0))
        throw std::invalid_argument("spectral_j_damped: ell, eta > 0");
    if (k_max <= 0.0) k_max = 45.0 / eta;
    auto f = [&](double k) { return k * std::sqrt(k * k + m * m) * std::sin(k * ell) *
                                    std::exp(-eta * k); };
    double panel = M_PI / ell;
    long n_panels = static_cast<long>(k_max / panel) + 1;
    double scale = 2.0 / (ell * ell * ell) + m * m / ell + 1e-12;
    double tol_panel = 1e-8 * scale / static_cast<double>(n_panels);
    double sum = 0.0, comp = 0.0;
    for (long i = 0; i < n_panels; ++i) {
        double k0 = i * panel;
        double k1 = std::min(k0 + panel, k_max);
        if (!(k1 > k0)) break;
        double v = integrate_1d(f, k0, k1, tol_panel, 24);
        double t = sum + v;
        comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

// Two-level even-power Richardson extrapolation over {eta, eta/2, eta/4}.
inline double spectral_j(double ell, double m, double eta0 = 0.0, double k_max = 0.0) {
    if (eta0 <= 0.0) eta0 = 0.2 * ell;
    double j0 = spectral_j_damped(ell, m, eta0, k_max);
    double j1 = spectral_j_damped(ell, m, 0.5 * eta0, k_max);
    double j2 = spectral_j_damped(ell, m, 0.25 * eta0, k_max);
    double r1 = (4.0 * j1 - j0) / 3.0;
    double r2 = (4.0 * j2 - j1) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

// Class energy via the spectral kernel: (-1)^n M_n/(4 pi^2) * integral of
// sqrt(D) J(l); cross-check route, never substituted for class_contribution.
inline Contribution spectral_contribution(const Scene& sc, const ReflectionSequence& seq,
                                          const PhysicalParams& pp, double k_max,
                                          const IntegratorConfig& icfg) {
    check_physical_params(pp);
    double sign = (pp.bc == BoundaryCondition::dirichlet && seq.n % 2 != 0) ? -1.0 : 1.0;
    double w = sign * static_cast<double>(seq.multiplicity) / (4.0 * M_PI * M_PI);

    std::map<double, double> cache;
    std::mutex cache_mutex;
    detail::StatusTally tally;
    auto f = [&](const Vec3& p) -> std::optional<double> {
        if (!sc.in_bounding_region(p) || !sc.contains(p)) return std::nullopt;
        OpticalPath path = solve_and_validate(sc, p, seq);
        if (path.status != PathStatus::valid) {
            tally.bump(path.status);
            return std::nullopt;
        }
        EnlargementResult enl = enlargement_factor_propagated(sc, path);
        if (!enl.ok) {
            ++tally.caustic;
            return std::nullopt;
        }
        double le = std::sqrt(path.length * path.length + pp.epsilon * pp.epsilon);
        double j;
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            auto it = cache.find(le);
            if (it != cache.end()) {
                j = it->second;
            } else {
                j = spectral_j(le, pp.mass, 0.0, k_max);
                cache.emplace(le, j);
            }
        }
        return enl.sqrt_delta * j;
    };
    IntegralEstimate est = integrate_volume(f, scene_box(sc), icfg);

    Contribution c;
    c.seq = seq;
    c.value = w * est.value;
    c.error = std::fabs(w) * est.std_error;
    c.divergent = (seq.n == 1);
    c.finite_value = c.value;
    c.finite_error = c.error;
    c.n_evaluated = est.n_evaluated;
    c.n_excluded = est.n_excluded;
    c.n_no_convergence = tally.no_convergence.load();
    c.n_off_surface = tally.off_surface.load();
    c.n_shadowed = tally.shadowed.load();
    c.n_grazing = tally.grazing.load();
    c.n_penetrates = tally.penetrates.load();
    c.n_caustic = tally.caustic.load();
    c.converged = est.converged;
    return c;
}

}  // namespace optcas
