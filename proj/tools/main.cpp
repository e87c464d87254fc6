#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "optcas/cli.hpp"
#include "optcas/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Casimir energies from classical closed optical paths"};
    app.set_version_flag("--version", std::string(optcas::kVersion));
    app.require_subcommand(1);

    std::string config;
    double xi_min = 0.01, xi_max = 1.0;
    int points = 10, grid = 0;
    optcas::cli::ValidateOptions vopt;

    auto* energy = app.add_subcommand("energy", "per-class energies for one configuration");
    energy->add_option("--config", config, "run configuration file")->required();

    auto* sweep = app.add_subcommand("sweep", "gap sweep at fixed sphere radius");
    sweep->add_option("--config", config, "run configuration file")->required();
    sweep->add_option("--xi-min", xi_min, "smallest gap/radius ratio")->required();
    sweep->add_option("--xi-max", xi_max, "largest gap/radius ratio")->required();
    sweep->add_option("--points", points, "number of log-spaced points")->required();

    auto* map = app.add_subcommand("map", "local integrand on an (r, z) grid");
    map->add_option("--config", config, "run configuration file")->required();
    map->add_option("--grid", grid, "grid resolution override");

    auto* validate = app.add_subcommand("validate", "analytic oracle checks");
    validate->add_option("--samples", vopt.samples, "Monte Carlo budget for the checks");
    validate->add_option("--perturb-k2", vopt.perturb_k2,
                         "fault-injection: scale K2 by (1 + x) in the recurrence check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*energy) return optcas::cli::cmd_energy(config);
        if (*sweep) return optcas::cli::cmd_sweep(config, xi_min, xi_max, points);
        if (*map) return optcas::cli::cmd_map(config, grid);
        return optcas::cli::cmd_validate(vopt);
    } catch (const optcas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
