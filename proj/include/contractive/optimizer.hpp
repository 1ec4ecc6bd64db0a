#pragma once

// Multi-start Nelder-Mead over a bounded box with periodic (angular)
// coordinates, seeded from a shifted Halton sequence.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contractive/state_model.hpp"

namespace contractive {

struct Dimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    bool periodic = false;   // lower/upper span one period
    bool log_scale = false;  // searched in log coordinates
};

struct SearchSpace {
    std::vector<Dimension> dims;

    std::size_t size() const { return dims.size(); }
    std::size_t index_of(const std::string& name) const;
    void validate() const;
};

/// eta, kappa, theta, delta
SearchSpace cat2_search_space();
/// eta, kappa_plus, kappa_minus, theta_plus, theta_minus, delta
SearchSpace cat3_search_space();

struct OptimizerConfig {
    int n_starts = 256;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
    double xtol = 1e-10;
    int max_evals_per_start = 40000;
    int max_restarts = 3;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.05;  // fraction of each (internal) range

    /// Dimensions pinned to a value and removed from the search.
    std::map<std::string, double> fixed;
    /// Per-dimension bound overrides.
    std::map<std::string, std::pair<double, double>> bounds;

    /// cat3 only: search kappa_plus = 1, theta_plus = theta_minus.
    bool symmetric_slice = false;
    /// Drop eta from the search and use the closed-form optimal time.
    bool analytic_eta = false;
    double eps_norm = kDefaultNormFloor;
};

struct LocalMinimum {
    std::vector<double> params;
    double value = 0.0;
};

struct OptResult {
    std::vector<std::string> names;
    std::vector<double> params;
    double lambda_min = 0.0;
    long n_evals = 0;
    int n_starts = 0;
    bool converged = false;
    /// max - min of the top-decile local minimum values
    double spread = 0.0;
    double best_seed_value = 0.0;
    /// distinct local minima, best first
    std::vector<LocalMinimum> minima;

    double param(const std::string& name) const;
};

using Objective = std::function<double(std::span<const double>)>;

/// Objective values that are NaN are treated as +inf. Throws
/// NoFiniteEvaluation if no start ever sees a finite value.
OptResult minimize(const Objective& objective, const SearchSpace& space,
                   const OptimizerConfig& config);

/// Lambda at (eta, kappa, theta, delta); +inf where the state is degenerate.
double cat2_objective(std::span<const double> x, double eps_norm = kDefaultNormFloor);
/// Lambda at (eta, kappa_plus, kappa_minus, theta_plus, theta_minus, delta).
double cat3_objective(std::span<const double> x, double eps_norm = kDefaultNormFloor);

OptResult optimize_cat2(const OptimizerConfig& config = {});
OptResult optimize_cat3(const OptimizerConfig& config = {});

}  // namespace contractive
