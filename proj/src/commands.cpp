#include "contractive/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "contractive/analytic_moments.hpp"
#include "contractive/dynamics.hpp"
#include "contractive/optimizer.hpp"

namespace contractive {

namespace {

using ParamMap = std::map<std::string, double>;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

double require(const ParamMap& p, const std::string& name, Family f) {
    const auto it = p.find(name);
    if (it == p.end())
        config_error("family " + std::string(to_string(f)) + " needs parameter '" + name + "'");
    return it->second;
}

Family require_family(const RunConfig& cfg) {
    if (!cfg.family) config_error("no state family given");
    return *cfg.family;
}

Cat2Params cat2_from(const ParamMap& p, double eps) {
    return make_cat2(require(p, "kappa", Family::Cat2), require(p, "theta", Family::Cat2),
                     require(p, "delta", Family::Cat2), eps);
}

Cat3Params cat3_from(const ParamMap& p, double eps) {
    return make_cat3(require(p, "kappa_plus", Family::Cat3), require(p, "kappa_minus", Family::Cat3),
                     require(p, "theta_plus", Family::Cat3), require(p, "theta_minus", Family::Cat3),
                     require(p, "delta", Family::Cat3), eps);
}

Moments moments_for(Family f, const ParamMap& p, const RunConfig& cfg) {
    switch (f) {
        case Family::Cat2: return cat2_moments(cat2_from(p, cfg.eps_norm), cfg.eps_norm);
        case Family::Cat3: return cat3_moments(cat3_from(p, cfg.eps_norm), cfg.eps_norm);
        case Family::Yuen: return yuen_moments(make_yuen(require(p, "xi", f), require(p, "var_x", f)));
        case Family::Gaussian: return superposition_moments(single_gaussian());
        case Family::Superposition:
            return superposition_moments(make_superposition(cfg.components, cfg.width, cfg.eps_norm),
                                         cfg.eps_norm);
    }
    return {};
}

GaussianSuperposition superposition_for(Family f, const ParamMap& p, const RunConfig& cfg) {
    switch (f) {
        case Family::Cat2: return to_superposition(cat2_from(p, cfg.eps_norm));
        case Family::Cat3: return to_superposition(cat3_from(p, cfg.eps_norm));
        case Family::Gaussian: return single_gaussian();
        case Family::Superposition: return make_superposition(cfg.components, cfg.width, cfg.eps_norm);
        case Family::Yuen: break;
    }
    config_error("the yuen family has no Gaussian-superposition form to put on a grid");
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(epoch));
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_params(const ParamMap& p) {
    std::string out;
    for (const auto& [k, v] : p) {
        if (!out.empty()) out += ';';
        out += k + '=' + format_double(v);
    }
    return out;
}

ScanTable new_table(const std::string& command, const RunConfig& cfg, std::vector<std::string> columns) {
    ScanTable t;
    t.columns = std::move(columns);
    t.set_meta("command", command);
    if (cfg.family) t.set_meta("family", std::string(to_string(*cfg.family)));
    if (!cfg.preset.empty()) t.set_meta("preset", cfg.preset);
    t.set_meta("params", join_params(cfg.params));
    if (const auto eta = cfg.resolved_eta()) t.set_meta("eta", format_double(*eta));
    t.set_meta("seed", std::to_string(cfg.seed));
    t.set_meta("table_version", "1");
    t.set_meta("timestamp", timestamp());
    return t;
}

int worker_count(int requested, std::size_t jobs) {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, n) on a fixed interleaved partition; the first
// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(worker_count(threads, n));
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Regions I and II are defined for cat2 only; other non-contractive states
// report None and contractive ones leave the cell empty.
Cell region_code(Family f, const ParamMap& p, const RunConfig& cfg, const Moments& m) {
    if (f == Family::Cat2) return static_cast<double>(contractivity_region(cat2_from(p, cfg.eps_norm)));
    if (!is_contractive(m)) return static_cast<double>(ContractivityRegion::None);
    return std::nullopt;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1.0); }

}  // namespace

double VerifyReport::worst() const {
    return std::max({moment_discrepancy, curve_residual, spectral_residual, im_xp_error});
}

RunConfig apply_preset(RunConfig cfg, const std::string& name) {
    auto set_family = [&](Family f) {
        if (cfg.family && *cfg.family != f)
            config_error("preset " + name + " is for family " + std::string(to_string(f)));
        cfg.family = f;
    };
    auto default_param = [&](const std::string& k, double v) { cfg.params.emplace(k, v); };
    auto default_sweep = [&](std::vector<std::pair<std::string, Range>> s) {
        if (cfg.sweep.empty()) cfg.sweep = std::move(s);
    };
    const Range kappa{0.1, 10.0, 121, true};
    const Range eta{0.05, 3.0, 60, false};

    cfg.preset = name;
    if (name == "fig1" || name == "fig2" || name == "fig3") {
        set_family(Family::Cat2);
        default_param("theta", name == "fig1" ? kPaperCat2.theta_deg : name == "fig2" ? 0.0 : 180.0);
        default_param("delta", kPaperCat2.delta);
        default_sweep({{"eta", eta}, {"kappa", kappa}});
    } else if (name == "fig4") {
        set_family(Family::Cat2);
        default_param("delta", kPaperCat2.delta);
        if (!cfg.eta && !cfg.dimensional) cfg.eta = kPaperCat2Eta;
        default_sweep({{"theta", Range{0.0, 360.0, 181, false}}, {"kappa", kappa}});
    } else if (name == "fig5") {
        set_family(Family::Cat2);
        default_param("theta", kPaperCat2.theta_deg);
        if (!cfg.eta && !cfg.dimensional) cfg.eta = kPaperCat2Eta;
        default_sweep({{"delta", Range{0.02, 3.0, 150, false}}, {"kappa", kappa}});
    } else if (name == "fig6" || name == "fig7") {
        default_sweep({{"eta", Range{0.0, 3.0, 61, false}}});
    } else {
        config_error("unknown preset '" + name + "' (expected fig1..fig7)");
    }
    return cfg;
}

SampledFamilyState random_state(std::mt19937_64& rng, Family family) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + u(rng) * std::log(hi / lo)); };
    for (;;) {
        try {
            switch (family) {
                case Family::Cat2: {
                    const auto p = make_cat2(log_uniform(0.1, 10.0), 360.0 * u(rng), 0.05 + 2.95 * u(rng));
                    return {family, to_superposition(p), cat2_moments(p)};
                }
                case Family::Cat3: {
                    const auto p = make_cat3(log_uniform(0.1, 10.0), log_uniform(0.1, 10.0), 360.0 * u(rng),
                                             360.0 * u(rng), 0.05 + 2.95 * u(rng));
                    return {family, to_superposition(p), cat3_moments(p)};
                }
                case Family::Superposition: {
                    std::vector<Component> comps(4);
                    for (auto& c : comps) {
                        c.amplitude = std::polar(log_uniform(0.2, 2.0), 2.0 * std::acos(-1.0) * u(rng));
                        c.center = -3.0 + 6.0 * u(rng);
                    }
                    auto s = make_superposition(std::move(comps));
                    return {family, s, superposition_moments(s)};
                }
                default: config_error("random states exist for cat2, cat3 and superposition only");
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateNorm) throw;
        }
    }
}

VerifyReport verify_state(const GaussianSuperposition& state, const Moments& closed, std::optional<Grid> grid,
                          int n_eta, double eta_max) {
    const Grid g = grid ? *grid : default_grid(state, eta_max);
    VerifyReport r;

    const SampledState s0 = sample(state, g);
    const GridMoments gm = grid_moments_with_diagnostics(s0);
    const Moments& m = gm.moments;
    r.moment_discrepancy = std::max({relative(closed.mean_x, m.mean_x), relative(closed.mean_p, m.mean_p),
                                     relative(closed.var_x, m.var_x), relative(closed.var_p, m.var_p),
                                     relative(closed.corr_xp, m.corr_xp), relative(closed.re_xp, m.re_xp)});
    r.im_xp_error = std::abs(gm.im_xp - 0.5);

    const VarianceCurve curve = curve_from_moments(closed);
    for (int i = 1; i <= n_eta; ++i) {
        const double eta = eta_max * static_cast<double>(i) / static_cast<double>(n_eta);
        const double v = grid_moments(evolve_analytic(state, eta, g)).var_x;
        const double expected = variance_at(curve, eta);
        r.curve_residual = std::max(r.curve_residual, std::abs(v - expected) / std::max(expected, 1.0));
    }
    const double v_spec = grid_moments(evolve_spectral(s0, eta_max)).var_x;
    const double expected = variance_at(curve, eta_max);
    r.spectral_residual = std::abs(v_spec - expected) / std::max(expected, 1.0);
    return r;
}

ScanTable cmd_eval(const RunConfig& cfg) {
    const Family f = require_family(cfg);
    const auto& names = family_parameters(f);
    const auto eta = cfg.resolved_eta();

    std::vector<std::string> cols(names.begin(), names.end());
    for (const char* c : {"eta", "mean_x", "mean_p", "var_x", "var_p", "corr_xp", "uncertainty_product", "a", "b",
                          "c", "eta_star", "lambda_min", "lambda_eta", "var_x_eta", "interval_lower",
                          "interval_upper", "region", "contractive"})
        cols.emplace_back(c);
    ScanTable t = new_table("eval", cfg, cols);
    t.set_meta("region_codes", "0=None;1=RegionI;2=RegionII");

    const Moments m = moments_for(f, cfg.params, cfg);
    const VarianceCurve v = curve_from_moments(m);
    const OptimalTime opt = optimal_eta(v);
    const auto interval = contractivity_interval(v);

    std::vector<Cell> row;
    for (const auto& n : names) row.emplace_back(require(cfg.params, n, f));
    row.push_back(eta);
    for (double x : {m.mean_x, m.mean_p, m.var_x, m.var_p, m.corr_xp, m.uncertainty_product(), v.a, v.b, v.c,
                     opt.eta_star, opt.lambda_min})
        row.emplace_back(x);
    row.push_back(eta ? Cell{lambda_at(v, *eta)} : Cell{});
    row.push_back(eta ? Cell{variance_at(v, *eta)} : Cell{});
    row.push_back(interval ? Cell{interval->lower} : Cell{});
    row.push_back(interval ? Cell{interval->upper} : Cell{});
    const Cell region = region_code(f, cfg.params, cfg, m);
    row.push_back(region);
    row.emplace_back(is_contractive(m) ? 1.0 : 0.0);
    t.add_row(std::move(row));
    if (region) t.set_meta("region", std::string(to_string(static_cast<ContractivityRegion>(
                                          static_cast<int>(*region)))));
    return t;
}

ScanTable cmd_scan(const RunConfig& cfg_in) {
    const RunConfig cfg = cfg_in.preset.empty() ? cfg_in : apply_preset(cfg_in, cfg_in.preset);
    const Family f = require_family(cfg);
    if (cfg.sweep.empty() || cfg.sweep.size() > 2) config_error("scan needs one or two swept parameters");

    const auto fixed_eta = cfg.resolved_eta();
    bool eta_swept = false;
    std::vector<std::string> cols;
    std::vector<std::vector<double>> axes;
    for (const auto& [name, range] : cfg.sweep) {
        eta_swept = eta_swept || name == "eta";
        cols.push_back(name);
        axes.push_back(range.values());
    }
    if (eta_swept && fixed_eta) config_error("eta is both fixed and swept");
    const bool has_lambda = eta_swept || fixed_eta.has_value();
    if (has_lambda) cols.emplace_back("lambda");
    for (const char* c : {"lambda_min", "eta_star", "contractive", "degenerate"}) cols.emplace_back(c);

    const std::size_t n0 = axes[0].size();
    const std::size_t n1 = axes.size() > 1 ? axes[1].size() : 1;
    std::vector<std::vector<Cell>> rows(n0 * n1);

    parallel_for(rows.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t i = idx / n1;
        const std::size_t j = idx % n1;
        ParamMap p = cfg.params;
        std::optional<double> eta = fixed_eta;
        std::vector<Cell> row;
        for (std::size_t d = 0; d < axes.size(); ++d) {
            const double value = axes[d][d == 0 ? i : j];
            row.emplace_back(value);
            if (cfg.sweep[d].first == "eta")
                eta = value;
            else
                p[cfg.sweep[d].first] = value;
        }
        try {
            const Moments m = moments_for(f, p, cfg);
            const VarianceCurve v = curve_from_moments(m);
            const OptimalTime opt = optimal_eta(v);
            if (has_lambda) row.emplace_back(lambda_at(v, std::max(*eta, kMinScanEta)));
            row.emplace_back(opt.lambda_min);
            row.emplace_back(opt.eta_star);
            row.emplace_back(is_contractive(m) ? 1.0 : 0.0);
            row.emplace_back(0.0);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateNorm) throw;
            row.resize(cols.size());
            row.back() = 1.0;
        }
        rows[idx] = std::move(row);
    });

    ScanTable t = new_table("scan", cfg, cols);
    for (auto& r : rows) t.add_row(std::move(r));
    return t;
}

ScanTable cmd_compare(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    if (cfg.sweep.empty()) cfg = apply_preset(cfg, cfg.preset.empty() ? "fig6" : cfg.preset);
    if (cfg.sweep.size() != 1 || cfg.sweep[0].first != "eta") config_error("compare sweeps eta only");

    const VarianceCurve s2 = curve_from_moments(cat2_moments(kPaperCat2));
    const VarianceCurve s3 = curve_from_moments(cat3_moments(kPaperCat3));
    const VarianceCurve gauss = curve_from_moments(superposition_moments(single_gaussian()));

    ScanTable t = new_table("compare", cfg,
                            {"eta", "lambda_s2", "lambda_s3", "lambda_gauss", "v_s2", "v_s3", "v_gauss", "v_sql"});
    t.set_meta("s2_params", "kappa=" + format_double(kPaperCat2.kappa) + ";theta=" +
                                format_double(kPaperCat2.theta_deg) + ";delta=" + format_double(kPaperCat2.delta));
    t.set_meta("s3_params", "kappa_plus=" + format_double(kPaperCat3.kappa_plus) +
                                ";kappa_minus=" + format_double(kPaperCat3.kappa_minus) +
                                ";theta_plus=" + format_double(kPaperCat3.theta_plus_deg) +
                                ";theta_minus=" + format_double(kPaperCat3.theta_minus_deg) +
                                ";delta=" + format_double(kPaperCat3.delta));
    t.set_meta("variance_units", "width^2");
    for (const auto& [name, curve] : {std::pair{"s2", s2}, std::pair{"s3", s3}}) {
        if (const auto iv = contractivity_interval(curve)) {
            t.set_meta(std::string(name) + "_interval_lower", format_double(iv->lower));
            t.set_meta(std::string(name) + "_interval_upper", format_double(iv->upper));
        }
    }
    for (double eta : cfg.sweep[0].second.values()) {
        const double at = std::max(eta, kMinScanEta);
        t.add_row({eta, lambda_at(s2, at), lambda_at(s3, at), lambda_at(gauss, at), variance_at(s2, eta),
                   variance_at(s3, eta), variance_at(gauss, eta), eta});
    }
    return t;
}

ScanTable cmd_verify(const RunConfig& cfg) {
    std::optional<Grid> grid;
    if (cfg.grid_half_width || cfg.grid_points)
        grid = make_grid(cfg.grid_half_width.value_or(40.0), cfg.grid_points.value_or(std::size_t{1} << 14));

    struct Job {
        Family family;
        GaussianSuperposition state;
        Moments closed;
    };
    std::vector<Job> jobs;
    if (cfg.verify_samples > 0) {
        static constexpr Family cycle[] = {Family::Cat2, Family::Cat3, Family::Superposition};
        for (int i = 0; i < cfg.verify_samples; ++i) {
            std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(i)};
            std::mt19937_64 rng(seq);
            auto s = random_state(rng, cycle[i % 3]);
            jobs.push_back({s.family, std::move(s.state), s.closed_form});
        }
    } else {
        const Family f = require_family(cfg);
        jobs.push_back({f, superposition_for(f, cfg.params, cfg), moments_for(f, cfg.params, cfg)});
    }

    std::vector<VerifyReport> reports(jobs.size());
    parallel_for(jobs.size(), cfg.threads,
                 [&](std::size_t i) { reports[i] = verify_state(jobs[i].state, jobs[i].closed, grid); });

    ScanTable t = new_table("verify", cfg,
                            {"index", "family", "moment_discrepancy", "curve_residual", "spectral_residual",
                             "im_xp_error", "pass"});
    t.set_meta("family_codes", "0=cat2;1=cat3;2=yuen;3=gaussian;4=superposition");
    t.set_meta("tolerance", format_double(kVerifyTolerance));
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = reports[i];
        t.add_row({static_cast<double>(i), static_cast<double>(jobs[i].family), r.moment_discrepancy,
                   r.curve_residual, r.spectral_residual, r.im_xp_error, r.worst() <= kVerifyTolerance ? 1.0 : 0.0});
    }
    t.set_meta("status", verification_passed(t) ? "pass" : "fail");
    return t;
}

bool verification_passed(const ScanTable& t) {
    for (const auto& c : t.column("pass"))
        if (!c || *c != 1.0) return false;
    return true;
}

ScanTable cmd_optimize(const RunConfig& cfg) {
    const Family f = require_family(cfg);
    if (f != Family::Cat2 && f != Family::Cat3) config_error("optimize supports cat2 and cat3");

    const OptResult r = f == Family::Cat2 ? optimize_cat2(cfg.optimizer) : optimize_cat3(cfg.optimizer);

    std::vector<std::string> cols{"rank"};
    cols.insert(cols.end(), r.names.begin(), r.names.end());
    for (const char* c : {"lambda_min", "contractive", "n_evals", "n_starts", "converged", "spread"})
        cols.emplace_back(c);
    ScanTable t = new_table("optimize", cfg, cols);
    t.set_meta("n_starts", std::to_string(cfg.optimizer.n_starts));
    t.set_meta("optimizer_seed", std::to_string(cfg.optimizer.seed));

    auto contractive_at = [&](const std::vector<double>& x) {
        const Moments m = f == Family::Cat2 ? cat2_moments(Cat2Params{x[1], x[2], x[3]}, cfg.eps_norm)
                                            : cat3_moments(Cat3Params{x[1], x[2], x[3], x[4], x[5]}, cfg.eps_norm);
        return is_contractive(m) ? 1.0 : 0.0;
    };
    auto emit = [&](std::size_t rank, const std::vector<double>& params, double value) {
        std::vector<Cell> row{static_cast<double>(rank)};
        for (double x : params) row.emplace_back(x);
        row.emplace_back(value);
        row.emplace_back(contractive_at(params));
        for (double x : {static_cast<double>(r.n_evals), static_cast<double>(r.n_starts),
                         r.converged ? 1.0 : 0.0, r.spread})
            row.emplace_back(x);
        t.add_row(std::move(row));
    };
    emit(0, r.params, r.lambda_min);
    for (std::size_t k = 1; k < r.minima.size(); ++k) emit(k, r.minima[k].params, r.minima[k].value);
    t.set_meta("contractive", contractive_at(r.params) == 1.0 ? "true" : "false");
    return t;
}

}  // namespace contractive
