#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contractive/commands.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "YAML run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--preset", o.preset, "figure preset fig1..fig7");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
    cmd->add_option("--set", o.set, "config override key.path=value (repeatable)");
}

contractive::RunConfig build_config(const Options& o) {
    std::vector<std::string> overrides = o.set;
    if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
    if (o.threads) overrides.push_back("threads=" + std::to_string(*o.threads));
    if (!o.preset.empty()) overrides.push_back("preset=" + o.preset);
    if (!o.out.empty()) overrides.push_back("output.path=\"" + o.out + "\"");
    if (!o.format.empty()) overrides.push_back("output.format=" + o.format);
    return o.config.empty() ? contractive::parse_run_config("", overrides)
                            : contractive::load_run_config(o.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contractive-state variance dynamics: evaluation, scans, oracle checks, optimization"};
    app.require_subcommand(1);
    Options opts;
    auto* eval = app.add_subcommand("eval", "moments, variance curve and Lambda at one point");
    auto* scan = app.add_subcommand("scan", "Lambda over one or two swept parameters");
    auto* compare = app.add_subcommand("compare", "cat2, cat3 and Gaussian curves at the optimal parameters");
    auto* verify = app.add_subcommand("verify", "closed-form moments against the grid oracle");
    auto* optimize = app.add_subcommand("optimize", "multi-start minimization of Lambda");
    for (auto* c : {eval, scan, compare, verify, optimize}) add_common(c, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        contractive::RunConfig cfg = build_config(opts);
        contractive::ScanTable table;
        if (eval->parsed())
            table = contractive::cmd_eval(cfg);
        else if (scan->parsed())
            table = contractive::cmd_scan(cfg);
        else if (compare->parsed())
            table = contractive::cmd_compare(cfg);
        else if (verify->parsed())
            table = contractive::cmd_verify(cfg);
        else
            table = contractive::cmd_optimize(cfg);

        if (cfg.out_path.empty()) {
            contractive::write_table(table, std::cout, cfg.format);
        } else {
            std::ofstream out(cfg.out_path);
            if (!out) {
                std::cerr << "error: cannot write " << cfg.out_path << '\n';
                return 1;
            }
            contractive::write_table(table, out, cfg.format);
        }
        if (verify->parsed() && !contractive::verification_passed(table)) {
            std::cerr << "verification failed: discrepancy above " << contractive::kVerifyTolerance << '\n';
            return 3;
        }
        return 0;
    } catch (const contractive::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_domain_error() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
