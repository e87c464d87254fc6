#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "optcas/energy.hpp"
#include "optcas/montecarlo.hpp"
#include "optcas/path.hpp"
#include "optcas/scene.hpp"

namespace optcas {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string format = "csv";  // csv | json
    std::string path;            // empty: stdout
    int grid = 64;               // map resolution per axis
};

struct RunConfig {
    SceneConfig scene;
    PhysicalParams physics;
    int max_order = 4;
    IntegratorConfig integration;
    OutputConfig output;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct ConfigCursor {
    const std::string& file;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
    }

    double num(const std::string& v) const {
        size_t pos = 0;
        double x;
        try {
            x = std::stod(v, &pos);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (pos != v.size()) fail("expected a number, got '" + v + "'");
        return x;
    }

    long long integer(const std::string& v) const {
        size_t pos = 0;
        long long x;
        try {
            x = std::stoll(v, &pos);
        } catch (const std::exception&) {
            fail("expected an integer, got '" + v + "'");
        }
        if (pos != v.size()) fail("expected an integer, got '" + v + "'");
        return x;
    }
};

}  // namespace detail

inline RunConfig load_run_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file);

    RunConfig rc;
    std::string line, section;
    detail::ConfigCursor at{file};
    while (std::getline(in, line)) {
        ++at.line;
        size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line.erase(cpos);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "geometry" && section != "physics" && section != "integration" &&
                section != "output")
                at.fail("unknown section '[" + section + "]'");
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos) at.fail("expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (section.empty()) at.fail("key '" + key + "' outside any section");
        if (key.empty()) at.fail("empty key");
        if (val.empty()) at.fail("empty value for key '" + key + "'");

        if (section == "geometry") {
            if (key == "kind") {
                if (val == "parallel_plates")
                    rc.scene.kind = SceneKind::parallel_plates;
                else if (val == "sphere_plate")
                    rc.scene.kind = SceneKind::sphere_plate;
                else
                    at.fail("kind must be parallel_plates or sphere_plate, got '" + val + "'");
            } else if (key == "gap") {
                rc.scene.gap = at.num(val);
            } else if (key == "side") {
                rc.scene.side = at.num(val);
            } else if (key == "radius") {
                rc.scene.sphere_radius = at.num(val);
            } else {
                at.fail("unknown key '" + key + "' in [geometry]");
            }
        } else if (section == "physics") {
            if (key == "bc") {
                if (val == "dirichlet")
                    rc.physics.bc = BoundaryCondition::dirichlet;
                else if (val == "neumann")
                    rc.physics.bc = BoundaryCondition::neumann;
                else
                    at.fail("bc must be dirichlet or neumann, got '" + val + "'");
            } else if (key == "mass") {
                rc.physics.mass = at.num(val);
            } else if (key == "epsilon") {
                rc.physics.epsilon = at.num(val);
            } else if (key == "max_order") {
                rc.max_order = static_cast<int>(at.integer(val));
            } else {
                at.fail("unknown key '" + key + "' in [physics]");
            }
        } else if (section == "integration") {
            if (key == "samples") {
                rc.integration.samples = at.integer(val);
            } else if (key == "seed") {
                rc.integration.seed = static_cast<std::uint64_t>(at.integer(val));
            } else if (key == "strata") {
                rc.integration.strata_per_axis = static_cast<int>(at.integer(val));
            } else if (key == "workers") {
                rc.integration.workers = static_cast<int>(at.integer(val));
            } else if (key == "tolerance") {
                rc.integration.rel_tolerance = at.num(val);
            } else if (key == "passes") {
                rc.integration.max_passes = static_cast<int>(at.integer(val));
            } else {
                at.fail("unknown key '" + key + "' in [integration]");
            }
        } else {  // output
            if (key == "format") {
                if (val != "csv" && val != "json")
                    at.fail("format must be csv or json, got '" + val + "'");
                rc.output.format = val;
            } else if (key == "path") {
                rc.output.path = val;
            } else if (key == "grid") {
                rc.output.grid = static_cast<int>(at.integer(val));
            } else {
                at.fail("unknown key '" + key + "' in [output]");
            }
        }
    }

    if (!(rc.scene.gap > 0.0)) throw ConfigError(file + ": gap must be positive");
    if (!(rc.scene.side > 0.0)) throw ConfigError(file + ": side must be positive");
    if (!(rc.scene.sphere_radius > 0.0))
        throw ConfigError(file + ": radius must be positive");
    if (rc.physics.mass < 0.0) throw ConfigError(file + ": mass must be >= 0");
    if (!(rc.physics.epsilon > 0.0)) throw ConfigError(file + ": epsilon must be positive");
    if (rc.max_order < 2 || rc.max_order > kMaxReflections)
        throw ConfigError(file + ": max_order must be in [2, " +
                                 std::to_string(kMaxReflections) + "]");
    if (rc.integration.samples < 1000)
        throw ConfigError(file + ": samples must be >= 1000");
    if (rc.output.grid < 8) throw ConfigError(file + ": grid must be >= 8");
    return rc;
}

}  // namespace optcas
