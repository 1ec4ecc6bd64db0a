#include "contractive/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "contractive/analytic_moments.hpp"
#include "contractive/dynamics.hpp"

namespace contractive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<int, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

// Free coordinates in the space NM actually walks: log for log-scale
// dimensions, identity otherwise.
struct Coord {
    std::size_t full_index;
    double lo;
    double hi;
    bool periodic;
    bool log_scale;

    double range() const { return hi - lo; }
    double to_value(double t) const {
        if (periodic) {
            double r = std::fmod(t - lo, range());
            if (r < 0.0) r += range();
            return lo + r;
        }
        return log_scale ? std::exp(t) : t;
    }
    double from_value(double v) const { return log_scale ? std::log(v) : v; }
    double clamp(double t) const { return periodic ? t : std::clamp(t, lo, hi); }
};

struct Problem {
    const Objective& objective;
    std::vector<Coord> coords;
    std::vector<double> base;  // full parameter vector with fixed values filled in

    std::vector<double> expand(const std::vector<double>& t) const {
        std::vector<double> full = base;
        for (std::size_t i = 0; i < coords.size(); ++i) full[coords[i].full_index] = coords[i].to_value(t[i]);
        return full;
    }
    double eval(const std::vector<double>& t, long& counter) const {
        ++counter;
        const auto full = expand(t);
        const double v = objective(full);
        return std::isnan(v) ? kInf : v;
    }
    double distance(const std::vector<double>& a, const std::vector<double>& b) const {
        double d = 0.0;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            double diff = std::abs(a[i] - b[i]);
            if (coords[i].periodic) {
                diff = std::fmod(diff, coords[i].range());
                diff = std::min(diff, coords[i].range() - diff);
            }
            d = std::max(d, diff / coords[i].range());
        }
        return d;
    }
};

struct LocalRun {
    std::vector<double> t;
    double value = kInf;
    double seed_value = kInf;
    long evals = 0;
    bool converged = false;
};

struct SimplexResult {
    std::vector<double> t;
    double value;
    bool converged;
};

SimplexResult nelder_mead(const Problem& prob, std::vector<double> start, double step,
                          const OptimizerConfig& cfg, long& evals) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> x(n + 1, start);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Coord& c = prob.coords[i];
        double delta = step * c.range();
        if (!c.periodic && x[i + 1][i] + delta > c.hi) delta = -delta;
        x[i + 1][i] = c.clamp(x[i + 1][i] + delta);
    }
    for (std::size_t i = 0; i <= n; ++i) f[i] = prob.eval(x[i], evals);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double s,
                     std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = prob.coords[i].clamp(from[i] + s * (to[i] - from[i]));
    };

    const long budget = evals + cfg.max_evals_per_start;
    bool converged = false;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) diameter = std::max(diameter, prob.distance(x[i], x[best]));
        if (diameter < cfg.xtol) {
            converged = true;
            break;
        }
        if (evals >= budget) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += x[i][d] / static_cast<double>(n);
        }

        along(centroid, x[worst], -cfg.reflection, trial);
        const double fr = prob.eval(trial, evals);
        if (fr < f[best]) {
            along(centroid, trial, cfg.expansion, trial2);
            const double fe = prob.eval(trial2, evals);
            if (fe < fr) {
                x[worst] = trial2;
                f[worst] = fe;
            } else {
                x[worst] = trial;
                f[worst] = fr;
            }
            continue;
        }
        if (fr < f[second]) {
            x[worst] = trial;
            f[worst] = fr;
            continue;
        }
        if (fr < f[worst]) {
            along(centroid, trial, cfg.contraction, trial2);
            const double fc = prob.eval(trial2, evals);
            if (fc <= fr) {
                x[worst] = trial2;
                f[worst] = fc;
                continue;
            }
        } else {
            along(centroid, x[worst], cfg.contraction, trial2);
            const double fc = prob.eval(trial2, evals);
            if (fc < f[worst]) {
                x[worst] = trial2;
                f[worst] = fc;
                continue;
            }
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            along(x[best], x[i], cfg.shrink, x[i]);
            f[i] = prob.eval(x[i], evals);
        }
    }
    const auto it = std::min_element(f.begin(), f.end());
    const auto idx = static_cast<std::size_t>(it - f.begin());
    return {x[idx], f[idx], converged};
}

LocalRun local_search(const Problem& prob, const std::vector<double>& seed, const OptimizerConfig& cfg) {
    LocalRun run;
    run.seed_value = prob.eval(seed, run.evals);
    run.t = seed;
    run.value = run.seed_value;
    double step = cfg.initial_step;
    for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
        SimplexResult r = nelder_mead(prob, run.t, step, cfg, run.evals);
        const double previous = run.value;
        if (r.value <= run.value) {
            run.t = std::move(r.t);
            run.value = r.value;
        }
        run.converged = r.converged;
        if (!std::isfinite(run.value)) break;
        // Restart from the optimum with a fresh, smaller simplex until it stops moving.
        if (attempt > 0 && previous - run.value <= 1e-14 * (1.0 + std::abs(run.value))) break;
        step = std::max(cfg.initial_step * 0.1, 1e-4);
    }
    return run;
}

int thread_count(const OptimizerConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SearchSpace apply_bounds(SearchSpace space, const OptimizerConfig& cfg) {
    for (const auto& [name, b] : cfg.bounds) {
        auto& d = space.dims[space.index_of(name)];
        d.lower = b.first;
        d.upper = b.second;
    }
    space.validate();
    return space;
}

}  // namespace

std::size_t SearchSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (dims[i].name == name) return i;
    throw Error(ErrorKind::Config, "unknown search dimension '" + name + "'");
}

void SearchSpace::validate() const {
    if (dims.empty()) throw Error(ErrorKind::Config, "search space has no dimensions");
    for (const auto& d : dims) {
        if (!(d.lower < d.upper))
            throw Error(ErrorKind::Config, "dimension '" + d.name + "' needs lower < upper");
        if (d.log_scale && !(d.lower > 0.0))
            throw Error(ErrorKind::Config, "log-scale dimension '" + d.name + "' needs lower > 0");
    }
}

double OptResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return params[i];
    throw Error(ErrorKind::Config, "result has no parameter '" + name + "'");
}

SearchSpace cat2_search_space() {
    return SearchSpace{{{"eta", 1e-4, 10.0, false, false},
                        {"kappa", 1e-3, 50.0, false, true},
                        {"theta", 0.0, 360.0, true, false},
                        {"delta", 1e-3, 5.0, false, false}}};
}

SearchSpace cat3_search_space() {
    return SearchSpace{{{"eta", 1e-4, 10.0, false, false},
                        {"kappa_plus", 1e-3, 50.0, false, true},
                        {"kappa_minus", 1e-3, 50.0, false, true},
                        {"theta_plus", 0.0, 360.0, true, false},
                        {"theta_minus", 0.0, 360.0, true, false},
                        {"delta", 1e-3, 5.0, false, false}}};
}

OptResult minimize(const Objective& objective, const SearchSpace& space_in,
                   const OptimizerConfig& config) {
    if (config.n_starts < 1) throw Error(ErrorKind::Config, "n_starts must be at least 1");
    const SearchSpace space = apply_bounds(space_in, config);

    Problem prob{objective, {}, std::vector<double>(space.size(), 0.0)};
    for (std::size_t i = 0; i < space.size(); ++i) {
        const Dimension& d = space.dims[i];
        if (auto it = config.fixed.find(d.name); it != config.fixed.end()) {
            prob.base[i] = it->second;
            continue;
        }
        Coord c{i, d.lower, d.upper, d.periodic, d.log_scale && !d.periodic};
        if (c.log_scale) {
            c.lo = std::log(d.lower);
            c.hi = std::log(d.upper);
        }
        prob.coords.push_back(c);
    }
    for (const auto& [name, value] : config.fixed) space.index_of(name);

    const std::size_t dim = prob.coords.size();
    if (dim > kPrimes.size()) throw Error(ErrorKind::Config, "too many search dimensions");

    OptResult result;
    for (const auto& d : space.dims) result.names.push_back(d.name);
    result.n_starts = config.n_starts;

    if (dim == 0) {
        long evals = 0;
        result.params = prob.base;
        result.lambda_min = prob.eval({}, evals);
        result.best_seed_value = result.lambda_min;
        result.n_evals = evals;
        if (!std::isfinite(result.lambda_min))
            throw Error(ErrorKind::NoFiniteEvaluation, "objective is not finite at the fixed point");
        result.converged = true;
        result.minima.push_back({result.params, result.lambda_min});
        return result;
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = unif(rng);

    const auto n_starts = static_cast<std::size_t>(config.n_starts);
    std::vector<std::vector<double>> seeds(n_starts, std::vector<double>(dim));
    for (std::size_t s = 0; s < n_starts; ++s) {
        for (std::size_t d = 0; d < dim; ++d) {
            double u = radical_inverse(s + 1, kPrimes[d]) + shift[d];
            u -= std::floor(u);
            seeds[s][d] = prob.coords[d].lo + u * prob.coords[d].range();
        }
    }

    std::vector<LocalRun> runs(n_starts);
    const auto workers = static_cast<std::size_t>(std::min<int>(thread_count(config), config.n_starts));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < n_starts; s += workers) runs[s] = local_search(prob, seeds[s], config);
            });
        }
    }

    std::vector<std::size_t> order(n_starts);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return runs[a].value < runs[b].value; });

    result.best_seed_value = kInf;
    for (const auto& r : runs) {
        result.n_evals += r.evals;
        result.best_seed_value = std::min(result.best_seed_value, r.seed_value);
    }
    const LocalRun& best = runs[order[0]];
    if (!std::isfinite(best.value))
        throw Error(ErrorKind::NoFiniteEvaluation, "objective was not finite at any sampled point");

    result.params = prob.expand(best.t);
    long extra = 0;
    std::vector<double> wrapped(dim);
    for (std::size_t d = 0; d < dim; ++d) wrapped[d] = prob.coords[d].from_value(result.params[prob.coords[d].full_index]);
    result.lambda_min = prob.eval(wrapped, extra);
    result.n_evals += extra;

    const std::size_t decile = std::max<std::size_t>(1, (n_starts + 9) / 10);
    double top_max = best.value;
    for (std::size_t i = 0; i < decile; ++i)
        if (std::isfinite(runs[order[i]].value)) top_max = std::max(top_max, runs[order[i]].value);
    result.spread = top_max - best.value;

    const double agree = 1e-9 * (1.0 + std::abs(best.value));
    int agreeing = 0;
    for (auto idx : order) {
        if (runs[idx].value - best.value > agree) break;
        ++agreeing;
    }
    result.converged = best.converged && agreeing >= 2;

    std::vector<const LocalRun*> distinct;
    for (auto idx : order) {
        const LocalRun& r = runs[idx];
        if (!std::isfinite(r.value)) break;
        bool seen = false;
        for (const auto* d : distinct)
            if (prob.distance(d->t, r.t) < 1e-3) {
                seen = true;
                break;
            }
        if (!seen) distinct.push_back(&r);
        if (distinct.size() >= 16) break;
    }
    for (const auto* d : distinct) result.minima.push_back({prob.expand(d->t), d->value});
    return result;
}

double cat2_objective(std::span<const double> x, double eps_norm) {
    const double eta = x[0];
    const Cat2Params p{x[1], x[2], x[3]};
    if (!(eta > 0.0) || !(p.kappa > 0.0) || !(p.delta > 0.0)) return kInf;
    try {
        const Moments m = cat2_moments(p, eps_norm);
        // Near the norm floor cancellation can yield moments no state has.
        if (m.uncertainty_product() < 0.25 - 1e-9) return kInf;
        return lambda_at(curve_from_moments(m), eta);
    } catch (const Error&) {
        return kInf;
    }
}

double cat3_objective(std::span<const double> x, double eps_norm) {
    const double eta = x[0];
    const Cat3Params p{x[1], x[2], x[3], x[4], x[5]};
    if (!(eta > 0.0) || !(p.kappa_plus > 0.0) || !(p.kappa_minus > 0.0) || !(p.delta > 0.0))
        return kInf;
    try {
        const Moments m = cat3_moments(p, eps_norm);
        if (m.uncertainty_product() < 0.25 - 1e-9) return kInf;
        return lambda_at(curve_from_moments(m), eta);
    } catch (const Error&) {
        return kInf;
    }
}

namespace {


// Wraps an objective over the full parameter vector (eta first) so that eta is
// replaced by the closed-form optimal time and, for the cat3 symmetric slice,
// theta_plus follows theta_minus. Surplus dimensions are pinned in the config
// and overwritten afterwards.
struct Reduction {
    bool analytic_eta = false;
    bool tie_theta = false;
    std::size_t theta_plus = 0;
    std::size_t theta_minus = 0;
};

std::vector<double> reduced_point(std::span<const double> x, const Reduction& r) {
    std::vector<double> full(x.begin(), x.end());
    if (r.tie_theta) full[r.theta_plus] = full[r.theta_minus];
    return full;
}

OptResult run_reduced(double (*lambda)(std::span<const double>, double),
                      Moments (*moments)(std::span<const double>, double), SearchSpace space,
                      OptimizerConfig cfg, const Reduction& red) {
    const double eps = cfg.eps_norm;
    if (red.analytic_eta) {
        if (cfg.fixed.count("eta")) throw Error(ErrorKind::Config, "analytic_eta conflicts with a fixed eta");
        cfg.fixed["eta"] = 1.0;
    }
    if (red.tie_theta) cfg.fixed[space.dims[red.theta_plus].name] = 0.0;

    Objective obj = [&](std::span<const double> x) {
        auto full = reduced_point(x, red);
        if (!red.analytic_eta) return lambda(full, eps);
        try {
            const Moments m = moments(full, eps);
            if (m.uncertainty_product() < 0.25 - 1e-9) return kInf;
            return optimal_eta(curve_from_moments(m)).lambda_min;
        } catch (const Error&) {
            return kInf;
        }
    };
    OptResult r = minimize(obj, space, cfg);

    auto finish = [&](std::vector<double>& p) {
        p = reduced_point(p, red);
        if (red.analytic_eta) {
            try {
                p[0] = optimal_eta(curve_from_moments(moments(p, eps))).eta_star;
            } catch (const Error&) {
            }
        }
    };
    finish(r.params);
    for (auto& m : r.minima) finish(m.params);
    r.lambda_min = lambda(r.params, eps);
    return r;
}

Moments cat2_point_moments(std::span<const double> x, double eps) {
    return cat2_moments(Cat2Params{x[1], x[2], x[3]}, eps);
}

Moments cat3_point_moments(std::span<const double> x, double eps) {
    return cat3_moments(Cat3Params{x[1], x[2], x[3], x[4], x[5]}, eps);
}

}  // namespace

OptResult optimize_cat2(const OptimizerConfig& config) {
    if (config.symmetric_slice) throw Error(ErrorKind::Config, "symmetric_slice applies to cat3 only");
    Reduction red;
    red.analytic_eta = config.analytic_eta;
    return run_reduced(&cat2_objective, &cat2_point_moments, cat2_search_space(), config, red);
}

OptResult optimize_cat3(const OptimizerConfig& config) {
    const SearchSpace space = cat3_search_space();
    OptimizerConfig cfg = config;
    Reduction red;
    red.analytic_eta = config.analytic_eta;
    if (config.symmetric_slice) {
        if (cfg.fixed.count("theta_plus"))
            throw Error(ErrorKind::Config, "symmetric_slice ties theta_plus to theta_minus; do not fix it");
        cfg.fixed.emplace("kappa_plus", 1.0);
        red.tie_theta = true;
        red.theta_plus = space.index_of("theta_plus");
        red.theta_minus = space.index_of("theta_minus");
    }
    return run_reduced(&cat3_objective, &cat3_point_moments, space, cfg, red);
}

}  // namespace contractive
