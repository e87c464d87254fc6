#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "optcas/energy.hpp"
#include "optcas/runconfig.hpp"
#include "optcas/scene.hpp"
#include "optcas/version.hpp"

namespace optcas {

using ordered_json = nlohmann::ordered_json;

// 13 significant digits, fixed width; NaN sentinels spelled "nan".
inline std::string fmt_sci(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

inline constexpr const char* kUnitsComment =
    "# units: hbar = c = 1; lengths in the config length unit L, energies in 1/L";

inline ordered_json config_to_json(const RunConfig& rc) {
    ordered_json j;
    j["geometry"]["kind"] =
        rc.scene.kind == SceneKind::parallel_plates ? "parallel_plates" : "sphere_plate";
    j["geometry"]["gap"] = rc.scene.gap;
    j["geometry"]["side"] = rc.scene.side;
    j["geometry"]["radius"] = rc.scene.sphere_radius;
    j["physics"]["bc"] =
        rc.physics.bc == BoundaryCondition::dirichlet ? "dirichlet" : "neumann";
    j["physics"]["mass"] = rc.physics.mass;
    j["physics"]["epsilon"] = rc.physics.epsilon;
    j["physics"]["max_order"] = rc.max_order;
    j["integration"]["samples"] = rc.integration.samples;
    j["integration"]["seed"] = rc.integration.seed;
    j["integration"]["strata"] = rc.integration.strata_per_axis;
    j["integration"]["workers"] = rc.integration.workers;
    j["integration"]["tolerance"] = rc.integration.rel_tolerance;
    j["integration"]["passes"] = rc.integration.max_passes;
    j["output"]["format"] = rc.output.format;
    j["output"]["grid"] = rc.output.grid;
    return j;
}

inline std::string energy_report_csv(const RunConfig& rc, const Scene& sc,
                                     const EnergyResult& res) {
    std::string out;
    out += "n,sequence,multiplicity,value,error,tag,samples,excluded\n";
    out += kUnitsComment;
    out += '\n';
    bool warn = false;
    for (const auto& c : res.classes) {
        out += std::to_string(c.seq.n) + ',' + c.seq.label(sc) + ',' +
               std::to_string(c.seq.multiplicity) + ',' + fmt_sci(c.value) + ',' +
               fmt_sci(c.error) + ',' + (c.divergent ? "divergent" : "finite") + ',' +
               std::to_string(c.n_evaluated) + ',' + std::to_string(c.n_excluded) + '\n';
        if (!c.converged) warn = true;
    }
    out += "# finite_part = " + fmt_sci(res.finite_part) + " +- " + fmt_sci(res.finite_error) +
           '\n';
    out += "# divergent_constant (n=1, epsilon = " + fmt_sci(rc.physics.epsilon) +
           ") = " + fmt_sci(res.divergent_constant) + " +- " + fmt_sci(res.divergent_error) +
           '\n';
    for (int k = 2; k <= res.max_order; ++k)
        out += "# cumulative_fraction(order<=" + std::to_string(k) +
               ") = " + fmt_sci(res.cumulative_fraction[k - 1]) + '\n';
    if (warn) out += "# warning: not_converged\n";
    return out;
}

inline ordered_json energy_report_json(const RunConfig& rc, const Scene& sc,
                                       const EnergyResult& res) {
    ordered_json j;
    j["version"] = kVersion;
    j["command"] = "energy";
    j["units"] = "hbar = c = 1; lengths in the config length unit L, energies in 1/L";
    j["seed"] = rc.integration.seed;
    j["config"] = config_to_json(rc);
    bool warn = false;
    j["classes"] = ordered_json::array();
    for (const auto& c : res.classes) {
        ordered_json e;
        e["n"] = c.seq.n;
        e["sequence"] = c.seq.label(sc);
        e["multiplicity"] = c.seq.multiplicity;
        e["value"] = c.value;
        e["error"] = c.error;
        e["tag"] = c.divergent ? "divergent" : "finite";
        e["finite_value"] = c.finite_value;
        e["finite_error"] = c.finite_error;
        e["samples"] = c.n_evaluated;
        e["excluded"] = c.n_excluded;
        e["rejected"] = {{"no_convergence", c.n_no_convergence},
                         {"off_surface", c.n_off_surface},
                         {"shadowed", c.n_shadowed},
                         {"grazing", c.n_grazing},
                         {"penetrates", c.n_penetrates},
                         {"caustic", c.n_caustic}};
        e["converged"] = c.converged;
        if (!c.converged) warn = true;
        j["classes"].push_back(e);
    }
    j["finite_part"] = res.finite_part;
    j["finite_error"] = res.finite_error;
    j["divergent_constant"] = res.divergent_constant;
    j["divergent_error"] = res.divergent_error;
    j["even_sum"] = res.even_sum;
    j["odd_finite_sum"] = res.odd_finite_sum;
    j["cumulative_fraction"] = res.cumulative_fraction;
    j["warning_not_converged"] = warn;
    return j;
}

}  // namespace optcas
