#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "optcas/analytic.hpp"
#include "optcas/energy.hpp"
#include "optcas/pfa.hpp"
#include "optcas/report.hpp"
#include "optcas/runconfig.hpp"
#include "optcas/wavefront.hpp"

namespace optcas {
namespace cli {

inline void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

inline int cmd_energy(const std::string& config_path) {
    RunConfig rc = load_run_config(config_path);
    Scene sc = build_scene(rc.scene);
    EnergyResult res = total_energy(sc, rc.physics, rc.max_order, rc.integration);
    std::string text;
    if (rc.output.format == "json")
        text = energy_report_json(rc, sc, res).dump(2) + "\n";
    else
        text = energy_report_csv(rc, sc, res);
    write_output(rc.output.path, text);
    return 0;
}

// Sphere radius held fixed, gap swept over log-spaced xi = a/R.
inline int cmd_sweep(const std::string& config_path, double xi_min, double xi_max, int points) {
    RunConfig rc = load_run_config(config_path);
    if (rc.scene.kind != SceneKind::sphere_plate)
        throw ConfigError(config_path + ": sweep requires kind = sphere_plate");
    if (!(xi_min > 0.0 && xi_max > xi_min))
        throw ConfigError("sweep: need 0 < xi-min < xi-max");
    if (points < 2) throw ConfigError("sweep: need points >= 2");

    std::string out;
    out +=
        "xi,E_optical,E_optical_err,E_pfa_plate,E_pfa_sphere,E_pfa_star,"
        "ratio_opt_to_pfa_plate\n";
    out += kUnitsComment;
    out += '\n';
    double lmin = std::log(xi_min), lmax = std::log(xi_max);
    for (int i = 0; i < points; ++i) {
        double xi = std::exp(lmin + (lmax - lmin) * i / (points - 1));
        SceneConfig scfg = rc.scene;
        scfg.gap = xi * scfg.sphere_radius;
        double e = NAN, err = NAN, pp = NAN, ps = NAN, pst = NAN, ratio = NAN;
        try {
            Scene sc = build_scene(scfg);
            EnergyResult res = total_energy(sc, rc.physics, rc.max_order, rc.integration);
            e = res.finite_part;
            err = res.finite_error;
            pp = pfa_energy(sc, PfaBase::plate);
            ps = pfa_energy(sc, PfaBase::sphere);
            pst = pfa_star_energy(sc);
            ratio = e / pp;
            for (const auto& c : res.classes)
                if (!c.converged)
                    std::cerr << "warning: xi = " << fmt_sci(xi) << ": class " << c.seq.label(sc)
                              << " not converged\n";
        } catch (const std::exception& ex) {
            std::cerr << "warning: xi = " << fmt_sci(xi) << " failed: " << ex.what() << "\n";
        }
        out += fmt_sci(xi) + ',' + fmt_sci(e) + ',' + fmt_sci(err) + ',' + fmt_sci(pp) + ',' +
               fmt_sci(ps) + ',' + fmt_sci(pst) + ',' + fmt_sci(ratio) + '\n';
    }
    write_output(rc.output.path, out);
    return 0;
}

// Local integrand on an (r, z) grid: every class of order 2..max_order, the
// one-reflection class omitted. Points inside a body emit an empty cell;
// vacuum points with no closed paths emit zero.
inline int cmd_map(const std::string& config_path, int grid_override) {
    RunConfig rc = load_run_config(config_path);
    int grid = grid_override > 0 ? grid_override : rc.output.grid;
    if (grid < 8) throw ConfigError("map: grid must be >= 8");
    Scene sc = build_scene(rc.scene);

    double r_ext, z_ext;
    if (rc.scene.kind == SceneKind::parallel_plates) {
        r_ext = 0.5 * rc.scene.side;
        z_ext = rc.scene.gap;
    } else {
        r_ext = sc.r_max;
        z_ext = sc.z_max;
    }
    auto seqs = enumerate_sequences(sc, rc.max_order);

    std::string out;
    out += "r,z,integrand\n";
    out += kUnitsComment;
    out += '\n';
    for (int i = 0; i < grid; ++i) {
        double r = (i + 0.5) * r_ext / grid;
        for (int j = 0; j < grid; ++j) {
            double z = (j + 0.5) * z_ext / grid;
            Vec3 p{r, 0.0, z};
            if (!sc.contains(p)) {
                out += fmt_sci(r) + ',' + fmt_sci(z) + ",\n";
                continue;
            }
            double sum = 0.0;
            bool caustic = false;
            for (const auto& seq : seqs) {
                if (seq.n < 2) continue;
                OpticalPath path = solve_and_validate(sc, p, seq);
                if (path.status != PathStatus::valid) continue;
                auto v = pointwise_integrand(sc, path, rc.physics);
                if (!v) {
                    caustic = true;
                    break;
                }
                sum += class_weight(seq, rc.physics.bc) * *v;
            }
            if (caustic)
                out += fmt_sci(r) + ',' + fmt_sci(z) + ",\n";
            else
                out += fmt_sci(r) + ',' + fmt_sci(z) + ',' + fmt_sci(sum) + '\n';
        }
    }
    write_output(rc.output.path, out);
    return 0;
}

struct ValidateOptions {
    std::int64_t samples = 200000;
    double perturb_k2 = 0.0;  // fault-injection hook for the recurrence check
};

inline int cmd_validate(const ValidateOptions& opt = {}) {
    int failures = 0;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        if (ok) {
            std::cout << "PASS: " << name << "\n";
        } else {
            std::cout << "FAIL: " << name << " (" << detail << ")\n";
            ++failures;
        }
    };

    {
        // K2(z) = K0(z) + 2 K1(z)/z
        double worst = 0.0;
        for (double z : {0.5, 1.0, 2.0, 10.0}) {
            double lhs = bessel_k2(z) * (1.0 + opt.perturb_k2);
            double rhs = bessel_k0(z) + 2.0 * bessel_k1(z) / z;
            worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
        }
        report(worst < 1e-12, "bessel K2 recurrence", "rel err " + fmt_sci(worst));
    }
    {
        double z = 1e-6;
        double v = z * z * bessel_k2(z);
        report(std::fabs(v - 2.0) < 1e-6, "bessel K2 small-argument limit",
               "z^2 K2 = " + fmt_sci(v));
    }
    {
        // plane paths must carry enlargement exactly 1/l^2
        Scene sc = build_scene({SceneKind::parallel_plates, 1.0, 1.0, 1.0});
        auto seqs = enumerate_sequences(sc, 2);
        const ReflectionSequence* two = nullptr;
        for (const auto& s : seqs)
            if (s.n == 2) two = &s;
        OpticalPath path = solve_and_validate(sc, {0.1, -0.2, 0.3}, *two);
        EnlargementResult enl = enlargement_factor_propagated(sc, path);
        double dev = std::fabs(enl.sqrt_delta * path.length - 1.0);
        report(path.status == PathStatus::valid && dev < 1e-9,
               "plane-pair enlargement identity", "dev " + fmt_sci(dev));
    }
    {
        // propagated vs finite-difference enlargement on a curved path
        Scene sc = build_scene({SceneKind::sphere_plate, 0.5, 1.0, 1.0});
        auto seqs = enumerate_sequences(sc, 2);
        const ReflectionSequence* two = nullptr;
        for (const auto& s : seqs)
            if (s.n == 2) two = &s;
        OpticalPath path = solve_and_validate(sc, {0.25, 0.1, 0.2}, *two);
        EnlargementResult ep = enlargement_factor_propagated(sc, path);
        EnlargementResult ef = enlargement_factor_fd(sc, path);
        double rel = std::fabs(ep.delta - ef.delta) / std::fabs(ep.delta);
        report(path.status == PathStatus::valid && ep.ok && ef.ok && rel < 1e-6,
               "enlargement dual-route agreement", "rel dev " + fmt_sci(rel));
    }
    {
        // one-reflection class, Monte Carlo vs exact regulated integral
        double a = 1.0, eps = 0.05;
        Scene sc = build_scene({SceneKind::parallel_plates, a, 1.0, 1.0});
        PhysicalParams pp;
        pp.epsilon = eps;
        ReflectionSequence seq;
        seq.n = 1;
        seq.multiplicity = 1;
        seq.surf[0] = 0;
        IntegratorConfig icfg;
        icfg.samples = opt.samples;
        icfg.strata_per_axis = 10;
        icfg.rel_tolerance = 0.02;
        icfg.max_passes = 3;
        Contribution c = class_contribution(sc, seq, pp, icfg);
        double T = 2.0 * a / eps;
        double exact_integral = (0.25 / (eps * eps * eps)) * (std::atan(T) + T / (1.0 + T * T));
        double exact = class_weight(seq, pp.bc) * exact_integral;
        double rel = std::fabs(c.value - exact) / std::fabs(exact);
        if (!c.converged) {
            report(false, "one-reflection Monte Carlo vs closed form", "not converged");
        } else {
            report(rel < 0.02 || std::fabs(c.value - exact) < 3.0 * c.error,
                   "one-reflection Monte Carlo vs closed form", "rel dev " + fmt_sci(rel));
        }
    }
    {
        Scene sc = build_scene({SceneKind::parallel_plates, 1.0, 1.0, 1.0});
        double p1 = pfa_energy(sc, PfaBase::plate);
        double p2 = pfa_star_energy(sc);
        double exact = -M_PI * M_PI / 1440.0;
        double dev = std::max(std::fabs(p1 - exact), std::fabs(p2 - exact)) / std::fabs(exact);
        report(dev < 1e-10, "plate-pair proximity-force identities", "rel dev " + fmt_sci(dev));
    }
    {
        // first-order a-dependent part of a plate pair: -S/(96 pi^2 a^3) per family
        Scene sc = build_scene({SceneKind::parallel_plates, 1.0, 1.0, 1.0});
        PhysicalParams pp;
        pp.epsilon = 1e-4;
        ReflectionSequence seq;
        seq.n = 1;
        seq.multiplicity = 1;
        seq.surf[0] = 0;
        double fin = first_order_finite(sc, seq, pp);
        double exact = -1.0 / (96.0 * M_PI * M_PI);
        double rel = std::fabs(fin - exact) / std::fabs(exact);
        report(rel < 1e-6, "first-order finite part quadrature", "rel dev " + fmt_sci(rel));
    }

    if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace cli
}  // namespace optcas
