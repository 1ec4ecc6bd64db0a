#include "contractive/run_config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "contractive/dynamics.hpp"

namespace contractive {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
    if (!node.IsMap()) fail(where + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get(const YAML::Node& node, const std::string& where) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail("bad value for " + where);
    }
}

YAML::Node with_path(const YAML::Node& node, const std::vector<std::string>& parts, std::size_t i,
                     const YAML::Node& value) {
    YAML::Node out = node && node.IsMap() ? YAML::Clone(node) : YAML::Node(YAML::NodeType::Map);
    if (i + 1 == parts.size())
        out[parts[i]] = value;
    else
        out[parts[i]] = with_path(out[parts[i]], parts, i + 1, value);
    return out;
}

YAML::Node apply_override(const YAML::Node& root, const std::string& ov) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) fail("override '" + ov + "' is not key=value");
    std::vector<std::string> parts;
    std::stringstream ss(ov.substr(0, eq));
    for (std::string p; std::getline(ss, p, '.');) {
        if (p.empty()) fail("override '" + ov + "' has an empty key segment");
        parts.push_back(p);
    }
    return with_path(root, parts, 0, YAML::Load(ov.substr(eq + 1)));
}

Range parse_range(const YAML::Node& n, const std::string& where) {
    check_keys(n, where, {"min", "max", "count", "log"});
    Range r;
    if (!n["min"] || !n["max"] || !n["count"]) fail(where + " needs min, max and count");
    r.min = get<double>(n["min"], where + ".min");
    r.max = get<double>(n["max"], where + ".max");
    r.count = get<int>(n["count"], where + ".count");
    if (n["log"]) r.log = get<bool>(n["log"], where + ".log");
    if (!(r.min < r.max)) fail(where + " needs min < max");
    if (r.count < 2) fail(where + " needs count >= 2");
    if (r.log && !(r.min > 0.0)) fail(where + " is logarithmic and needs min > 0");
    return r;
}

void parse_optimizer(const YAML::Node& n, OptimizerConfig& o) {
    check_keys(n, "optimizer",
               {"n_starts", "seed", "threads", "xtol", "max_evals_per_start", "max_restarts", "reflection",
                "expansion", "contraction", "shrink", "initial_step", "fixed", "bounds", "symmetric_slice",
                "analytic_eta"});
    if (n["n_starts"]) o.n_starts = get<int>(n["n_starts"], "optimizer.n_starts");
    if (n["seed"]) o.seed = get<std::uint64_t>(n["seed"], "optimizer.seed");
    if (n["threads"]) o.threads = get<int>(n["threads"], "optimizer.threads");
    if (n["xtol"]) o.xtol = get<double>(n["xtol"], "optimizer.xtol");
    if (n["max_evals_per_start"]) o.max_evals_per_start = get<int>(n["max_evals_per_start"], "optimizer.max_evals_per_start");
    if (n["max_restarts"]) o.max_restarts = get<int>(n["max_restarts"], "optimizer.max_restarts");
    if (n["reflection"]) o.reflection = get<double>(n["reflection"], "optimizer.reflection");
    if (n["expansion"]) o.expansion = get<double>(n["expansion"], "optimizer.expansion");
    if (n["contraction"]) o.contraction = get<double>(n["contraction"], "optimizer.contraction");
    if (n["shrink"]) o.shrink = get<double>(n["shrink"], "optimizer.shrink");
    if (n["initial_step"]) o.initial_step = get<double>(n["initial_step"], "optimizer.initial_step");
    if (n["symmetric_slice"]) o.symmetric_slice = get<bool>(n["symmetric_slice"], "optimizer.symmetric_slice");
    if (n["analytic_eta"]) o.analytic_eta = get<bool>(n["analytic_eta"], "optimizer.analytic_eta");
    if (const auto f = n["fixed"]) {
        if (!f.IsMap()) fail("optimizer.fixed must be a mapping");
        for (const auto& kv : f) {
            const auto key = kv.first.as<std::string>();
            o.fixed[key] = get<double>(kv.second, "optimizer.fixed." + key);
        }
    }
    if (const auto b = n["bounds"]) {
        if (!b.IsMap()) fail("optimizer.bounds must be a mapping");
        for (const auto& kv : b) {
            const auto key = kv.first.as<std::string>();
            const auto v = get<std::vector<double>>(kv.second, "optimizer.bounds." + key);
            if (v.size() != 2 || !(v[0] < v[1])) fail("optimizer.bounds." + key + " must be [lower, upper]");
            o.bounds[key] = {v[0], v[1]};
        }
    }
    if (o.n_starts < 1) fail("optimizer.n_starts must be at least 1");
    if (!(o.xtol > 0.0)) fail("optimizer.xtol must be positive");
}

}  // namespace

Family parse_family(const std::string& s) {
    if (s == "cat2") return Family::Cat2;
    if (s == "cat3") return Family::Cat3;
    if (s == "yuen") return Family::Yuen;
    if (s == "gaussian") return Family::Gaussian;
    if (s == "superposition") return Family::Superposition;
    fail("unknown family '" + s + "' (expected cat2, cat3, yuen, gaussian or superposition)");
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Cat2: return "cat2";
        case Family::Cat3: return "cat3";
        case Family::Yuen: return "yuen";
        case Family::Gaussian: return "gaussian";
        case Family::Superposition: return "superposition";
    }
    return "cat2";
}

const std::vector<std::string>& family_parameters(Family f) {
    static const std::vector<std::string> cat2{"kappa", "theta", "delta"};
    static const std::vector<std::string> cat3{"kappa_plus", "kappa_minus", "theta_plus", "theta_minus", "delta"};
    static const std::vector<std::string> yuen{"xi", "var_x"};
    static const std::vector<std::string> none;
    switch (f) {
        case Family::Cat2: return cat2;
        case Family::Cat3: return cat3;
        case Family::Yuen: return yuen;
        default: return none;
    }
}

std::vector<double> Range::values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        v[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min))) : min + t * (max - min);
    }
    v.front() = min;
    v.back() = max;
    return v;
}

std::optional<double> RunConfig::resolved_eta() const {
    if (eta) return eta;
    if (dimensional)
        return eta_from_time(dimensional->mass, dimensional->width, dimensional->time, dimensional->hbar);
    return std::nullopt;
}

double RunConfig::param(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) fail("missing parameter '" + name + "'");
    return it->second;
}

RunConfig parse_run_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    try {
        YAML::Node root = yaml_text.empty() ? YAML::Node(YAML::NodeType::Map) : YAML::Load(yaml_text);
        if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
        for (const auto& ov : overrides) root = apply_override(root, ov);
        check_keys(root, "config",
                   {"command", "family", "params", "components", "width", "eta", "dimensional", "sweep", "grid",
                    "optimizer", "verify", "preset", "seed", "threads", "output", "eps_norm"});

        if (root["family"]) {
            if (!root["family"].IsScalar()) fail("exactly one family per run");
            cfg.family = parse_family(root["family"].as<std::string>());
        }
        if (const auto p = root["params"]) {
            if (!p.IsMap()) fail("params must be a mapping");
            for (const auto& kv : p) {
                const auto key = kv.first.as<std::string>();
                cfg.params[key] = get<double>(kv.second, "params." + key);
            }
        }
        if (const auto c = root["components"]) {
            if (!c.IsSequence()) fail("components must be a list");
            for (std::size_t i = 0; i < c.size(); ++i) {
                const std::string where = "components[" + std::to_string(i) + "]";
                check_keys(c[i], where, {"re", "im", "center"});
                Component comp;
                comp.amplitude = {c[i]["re"] ? get<double>(c[i]["re"], where + ".re") : 0.0,
                                  c[i]["im"] ? get<double>(c[i]["im"], where + ".im") : 0.0};
                comp.center = c[i]["center"] ? get<double>(c[i]["center"], where + ".center") : 0.0;
                cfg.components.push_back(comp);
            }
        }
        if (root["width"]) cfg.width = get<double>(root["width"], "width");
        if (root["eta"]) cfg.eta = get<double>(root["eta"], "eta");
        if (const auto d = root["dimensional"]) {
            check_keys(d, "dimensional", {"mass", "width", "time", "hbar"});
            DimensionalTime dt;
            if (!d["mass"] || !d["width"] || !d["time"]) fail("dimensional needs mass, width and time");
            dt.mass = get<double>(d["mass"], "dimensional.mass");
            dt.width = get<double>(d["width"], "dimensional.width");
            dt.time = get<double>(d["time"], "dimensional.time");
            if (d["hbar"]) dt.hbar = get<double>(d["hbar"], "dimensional.hbar");
            cfg.dimensional = dt;
        }
        if (cfg.eta && cfg.dimensional) fail("give either eta or a dimensional block, not both");
        if (const auto s = root["sweep"]) {
            if (!s.IsMap()) fail("sweep must be a mapping");
            for (const auto& kv : s) {
                const auto key = kv.first.as<std::string>();
                cfg.sweep.emplace_back(key, parse_range(kv.second, "sweep." + key));
            }
        }
        if (const auto g = root["grid"]) {
            check_keys(g, "grid", {"half_width", "n_points"});
            if (g["half_width"]) cfg.grid_half_width = get<double>(g["half_width"], "grid.half_width");
            if (g["n_points"]) cfg.grid_points = get<std::size_t>(g["n_points"], "grid.n_points");
        }
        if (root["seed"]) cfg.seed = get<std::uint64_t>(root["seed"], "seed");
        if (root["threads"]) cfg.threads = get<int>(root["threads"], "threads");
        cfg.optimizer.seed = cfg.seed;
        cfg.optimizer.threads = cfg.threads;
        if (root["optimizer"]) parse_optimizer(root["optimizer"], cfg.optimizer);
        if (const auto v = root["verify"]) {
            check_keys(v, "verify", {"samples"});
            if (v["samples"]) cfg.verify_samples = get<int>(v["samples"], "verify.samples");
            if (cfg.verify_samples < 0) fail("verify.samples must be non-negative");
        }
        if (root["preset"]) cfg.preset = get<std::string>(root["preset"], "preset");
        if (root["eps_norm"]) cfg.eps_norm = get<double>(root["eps_norm"], "eps_norm");
        cfg.optimizer.eps_norm = cfg.eps_norm;
        if (const auto o = root["output"]) {
            check_keys(o, "output", {"path", "format"});
            if (o["path"]) cfg.out_path = get<std::string>(o["path"], "output.path");
            if (o["format"]) cfg.format = parse_format(get<std::string>(o["format"], "output.format"));
        }
    } catch (const YAML::Exception& e) {
        fail(std::string("cannot parse config: ") + e.what());
    }

    if (cfg.family) {
        const auto& names = family_parameters(*cfg.family);
        for (const auto& [k, v] : cfg.params)
            if (std::find(names.begin(), names.end(), k) == names.end())
                fail("parameter '" + k + "' does not belong to family " + std::string(to_string(*cfg.family)));
        for (const auto& [k, r] : cfg.sweep)
            if (k != "eta" && std::find(names.begin(), names.end(), k) == names.end())
                fail("swept parameter '" + k + "' does not belong to family " +
                     std::string(to_string(*cfg.family)));
        if (!cfg.components.empty() && *cfg.family != Family::Superposition)
            fail("components are only valid for the superposition family");
    }
    std::set<std::string> seen;
    for (const auto& [k, r] : cfg.sweep)
        if (!seen.insert(k).second) fail("parameter '" + k + "' swept twice");
    return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), overrides);
}

}  // namespace contractive
