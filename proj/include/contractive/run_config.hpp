#pragma once

// Run configuration: a YAML document plus `key.path=value` overrides.
//
//   family: cat2            # cat2 | cat3 | yuen | gaussian | superposition
//   params: {kappa: 2.26, theta: 127, delta: 0.49}
//   eta: 1.105
//   sweep:
//     kappa: {min: 0.1, max: 10, count: 121, log: true}
//   grid: {half_width: 30, n_points: 16384}
//   optimizer: {n_starts: 256, fixed: {theta: 180}, bounds: {delta: [0.4, 0.6]}}
//   verify: {samples: 100}
//   dimensional: {mass: 1e-26, width: 1e-6, time: 1e-3, hbar: 1.054571817e-34}
//   output: {path: out.csv, format: csv}

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contractive/optimizer.hpp"
#include "contractive/scan_table.hpp"
#include "contractive/state_model.hpp"

namespace contractive {

enum class Family { Cat2, Cat3, Yuen, Gaussian, Superposition };
Family parse_family(const std::string& s);
std::string_view to_string(Family f);

struct Range {
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    bool log = false;

    /// Evenly spaced (or log-spaced) points including both ends.
    std::vector<double> values() const;
};

struct DimensionalTime {
    double mass = 0.0;
    double width = 0.0;
    double time = 0.0;
    double hbar = 1.054571817e-34;
};

struct RunConfig {
    std::optional<Family> family;
    /// Family parameters by name; angles in degrees.
    std::map<std::string, double> params;
    /// Superposition family only.
    std::vector<Component> components;
    double width = 1.0;

    std::optional<double> eta;
    std::optional<DimensionalTime> dimensional;
    /// Swept parameters in the order given.
    std::vector<std::pair<std::string, Range>> sweep;

    std::optional<double> grid_half_width;
    std::optional<std::size_t> grid_points;

    OptimizerConfig optimizer;
    int verify_samples = 0;

    std::string preset;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_path;
    Format format = Format::Csv;
    double eps_norm = kDefaultNormFloor;

    /// eta, or the one derived from the dimensional block.
    std::optional<double> resolved_eta() const;
    double param(const std::string& name) const;
};

/// Overrides look like `params.kappa=2.3` or `optimizer.fixed.theta=180`;
/// the value is parsed as YAML. Throws Error(Config) on any problem.
RunConfig parse_run_config(const std::string& yaml_text,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Parameter names accepted for each family.
const std::vector<std::string>& family_parameters(Family f);

}  // namespace contractive
