#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "contractive/analytic_moments.hpp"
#include "contractive/commands.hpp"
#include "contractive/dynamics.hpp"
#include "doctest.h"

using namespace contractive;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

double cell(const ScanTable& t, std::size_t row, const std::string& col) {
    const auto c = t.at(row, col);
    REQUIRE(c.has_value());
    return *c;
}

RunConfig config(const std::string& yaml, std::vector<std::string> overrides = {}) {
    return parse_run_config(yaml, overrides);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CONTRACTIVE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("doubles survive a text round trip bit for bit") {
    ScanTable t;
    t.columns = {"a", "b", "c"};
    t.set_meta("family", "cat2");
    t.set_meta("seed", "5");
    t.add_row({0.1, 1.0 / 3.0, std::nullopt});
    t.add_row({-2.5e-300, 6.02214076e23, std::nexttoward(1.0, 2.0)});
    t.add_row({std::numeric_limits<double>::denorm_min(), NAN, INFINITY});
    CHECK_FALSE(t.rows[2][1].has_value());
    CHECK_FALSE(t.rows[2][2].has_value());

    for (Format f : {Format::Csv, Format::Json}) {
        std::stringstream ss;
        write_table(t, ss, f);
        const ScanTable back = f == Format::Csv ? read_csv(ss) : read_json(ss);
        CHECK(back.columns == t.columns);
        CHECK(back.metadata == t.metadata);
        REQUIRE(back.rows.size() == t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            for (std::size_t j = 0; j < t.columns.size(); ++j) CHECK(back.rows[i][j] == t.rows[i][j]);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK_THROWS_AS(t.add_row({1.0}), Error);
    CHECK(parse_format("json") == Format::Json);
    CHECK_THROWS_AS(parse_format("xml"), Error);
}

TEST_CASE("run config parsing and overrides") {
    const auto cfg = config(R"(
family: cat2
params: {kappa: 2.26, theta: 127, delta: 0.49}
eta: 1.105
sweep:
  kappa: {min: 0.1, max: 10, count: 5, log: true}
optimizer: {n_starts: 32, fixed: {theta: 180}, bounds: {delta: [0.4, 0.6]}}
output: {format: json}
)",
                            {"params.kappa=3", "optimizer.fixed.delta=0.5", "seed=9"});
    CHECK(*cfg.family == Family::Cat2);
    CHECK(cfg.param("kappa") == 3.0);
    CHECK(cfg.param("theta") == 127.0);
    CHECK(*cfg.eta == 1.105);
    CHECK(cfg.format == Format::Json);
    CHECK(cfg.seed == 9);
    CHECK(cfg.optimizer.seed == 9);
    CHECK(cfg.optimizer.n_starts == 32);
    CHECK(cfg.optimizer.fixed.at("theta") == 180.0);
    CHECK(cfg.optimizer.fixed.at("delta") == 0.5);
    CHECK(cfg.optimizer.bounds.at("delta").second == 0.6);
    REQUIRE(cfg.sweep.size() == 1);
    const auto v = cfg.sweep[0].second.values();
    CHECK(v.size() == 5);
    CHECK(v[0] == 0.1);
    CHECK(v[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[4] == 10.0);

    const auto dim = config("family: gaussian\ndimensional: {mass: 1.0e-25, width: 1.0e-6, time: 1.0e-3}\n");
    CHECK(*dim.resolved_eta() == doctest::Approx(1.054571817).epsilon(1e-12));
}

TEST_CASE("run config rejects malformed input") {
    CHECK(throws_kind(ErrorKind::Config, [] { config("family: cat4\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("family: [cat2, cat3]\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("bogus: 1\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("family: cat2\nparams: {xi: 1}\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("sweep: {kappa: {min: 2, max: 1, count: 3}}\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("sweep: {kappa: {min: 1, max: 2, count: 1}}\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("eta: [1, 2\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("eta: abc\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("", {"noequals"}); }));
    CHECK(throws_kind(ErrorKind::Config, [] { config("eta: 1\ndimensional: {mass: 1, width: 1, time: 1}\n"); }));
    CHECK(throws_kind(ErrorKind::Config, [] { load_run_config("/nonexistent/config.yaml"); }));
}

TEST_CASE("eval rows") {
    const auto cat = cmd_eval(config("family: cat2\nparams: {kappa: 2.26, theta: 127, delta: 0.49}\neta: 1.105\n"));
    REQUIRE(cat.rows.size() == 1);
    CHECK(std::abs(cell(cat, 0, "lambda_min") - 0.757) < 0.005);
    CHECK(cell(cat, 0, "lambda_eta") == doctest::Approx(0.758118).epsilon(1e-6));
    CHECK(cell(cat, 0, "region") == 1.0);
    CHECK(*cat.meta("region") == "RegionI");
    CHECK(cell(cat, 0, "contractive") == 1.0);

    const auto y = cmd_eval(config("family: yuen\nparams: {xi: 0.5, var_x: 0.5}\n"));
    CHECK(std::abs(cell(y, 0, "lambda_min") - (std::sqrt(2.0) - 1.0)) < 1e-12);
    CHECK_FALSE(y.at(0, "lambda_eta").has_value());

    const auto g = cmd_eval(config("family: gaussian\n"));
    CHECK(cell(g, 0, "lambda_min") == 1.0);
    CHECK(cell(g, 0, "region") == 0.0);
    CHECK(cell(g, 0, "contractive") == 0.0);

    const auto s = cmd_eval(config("family: superposition\ncomponents: [{re: 1, center: 1}, {im: -1, center: -1}]\n"));
    const auto c2 = cmd_eval(config("family: cat2\nparams: {kappa: 1, theta: 90, delta: 1}\n"));
    CHECK(cell(s, 0, "var_x") == doctest::Approx(cell(c2, 0, "var_x")).epsilon(1e-12));

    CHECK(throws_kind(ErrorKind::Config, [] { cmd_eval(config("family: cat2\nparams: {kappa: 2}\n")); }));
    CHECK(throws_kind(ErrorKind::DegenerateNorm,
                      [] { cmd_eval(config("family: cat2\nparams: {kappa: 1, theta: 180, delta: 1.0e-9}\n")); }));
    CHECK(throws_kind(ErrorKind::Config, [] { cmd_eval(config("")); }));
}

TEST_CASE("figure presets") {
    const auto fig1 = cmd_scan(config("preset: fig1\n"));
    bool island = false;
    for (const auto& c : fig1.column("lambda"))
        if (c && *c < 1.0) island = true;
    CHECK(island);
    CHECK(*fig1.meta("preset") == "fig1");

    for (const char* name : {"fig2", "fig3"}) {
        const auto t = cmd_scan(config(std::string("preset: ") + name + "\n"));
        CHECK(t.rows.size() == 60 * 121);
        double lowest = INFINITY;
        for (const auto& c : t.column("lambda"))
            if (c) lowest = std::min(lowest, *c);
        CHECK(lowest >= 1.0 - 1e-12);
    }

    const auto fig4 = cmd_scan(config("preset: fig4\n"));
    const std::size_t nt = 181, nk = 121;
    REQUIRE(fig4.rows.size() == nt * nk);
    std::vector<int> below(nt * nk);
    for (std::size_t r = 0; r < below.size(); ++r) below[r] = cell(fig4, r, "lambda") < 0.8;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nk; ++j) CHECK(below[i * nk + j] == below[(nt - 1 - i) * nk + (nk - 1 - j)]);
    // label connected islands of the thresholded map
    std::vector<int> label(below.size(), 0);
    int islands = 0;
    std::set<int> above_one, below_one;
    for (std::size_t start = 0; start < below.size(); ++start) {
        if (!below[start] || label[start]) continue;
        ++islands;
        std::vector<std::size_t> stack{start};
        label[start] = islands;
        while (!stack.empty()) {
            const std::size_t r = stack.back();
            stack.pop_back();
            const std::size_t i = r / nk, j = r % nk;
            (cell(fig4, r, "kappa") > 1.0 ? above_one : below_one).insert(islands);
            const std::size_t nbr[4][2] = {{(i + nt - 1) % nt, j}, {(i + 1) % nt, j}, {i, j ? j - 1 : j},
                                           {i, j + 1 < nk ? j + 1 : j}};
            for (const auto& n : nbr) {
                const std::size_t q = n[0] * nk + n[1];
                if (below[q] && !label[q]) {
                    label[q] = islands;
                    stack.push_back(q);
                }
            }
        }
    }
    CHECK(islands == 2);
    CHECK(above_one.size() == 1);
    CHECK(below_one.size() == 1);
    CHECK(*above_one.begin() != *below_one.begin());

    const auto fig5 = cmd_scan(config("preset: fig5\n"));
    CHECK(fig5.columns[0] == "delta");
    CHECK(fig5.rows.size() == 150 * 121);
    CHECK_THROWS_AS(cmd_scan(config("preset: fig9\n")), Error);
}

TEST_CASE("scan with degenerate cells and eta = 0") {
    const auto t = cmd_scan(config(
        "family: cat2\nparams: {kappa: 1, delta: 1.0e-9}\nsweep: {theta: {min: 0, max: 180, count: 3}, eta: {min: 0, max: 1, count: 2}}\n"));
    REQUIRE(t.rows.size() == 6);
    const auto even = curve_from_moments(cat2_moments(make_cat2(1.0, 0.0, 1e-9)));
    CHECK(cell(t, 0, "lambda") == doctest::Approx(lambda_at(even, kMinScanEta)));
    CHECK(cell(t, 0, "degenerate") == 0.0);
    CHECK(cell(t, 5, "degenerate") == 1.0);
    CHECK_FALSE(t.at(5, "lambda_min").has_value());
}

TEST_CASE("compare table") {
    const auto t = cmd_compare(config("sweep: {eta: {min: 0.6, max: 3, count: 49}}\n"));
    for (std::size_t r = 0; r < t.rows.size(); ++r) CHECK(cell(t, r, "lambda_s3") < cell(t, r, "lambda_s2"));
    const auto f7 = cmd_compare(config("preset: fig7\n"));
    REQUIRE(f7.rows.size() == 61);
    CHECK(cell(f7, 0, "lambda_gauss") == doctest::Approx(0.5 / kMinScanEta + 0.5 * kMinScanEta));
    CHECK(cell(f7, 0, "v_gauss") == 0.5);
    CHECK(cell(f7, 0, "v_sql") == 0.0);
    bool checked = false;
    for (std::size_t r = 0; r < f7.rows.size(); ++r) {
        if (cell(f7, r, "eta") != 1.0) continue;
        CHECK(cell(f7, r, "v_gauss") == cell(f7, r, "v_sql"));
        CHECK(cell(f7, r, "lambda_gauss") == 1.0);
        checked = true;
    }
    CHECK(checked);
    CHECK(f7.meta("s2_interval_lower").has_value());
}

TEST_CASE("verify") {
    const auto t = cmd_verify(config("verify: {samples: 9}\nseed: 3\n"));
    CHECK(t.rows.size() == 9);
    CHECK(verification_passed(t));
    CHECK(*t.meta("status") == "pass");

    const auto g = cmd_verify(config("family: gaussian\n"));
    CHECK(cell(g, 0, "moment_discrepancy") <= 1e-9);

    try {
        cmd_verify(config("family: cat2\nparams: {kappa: 1, theta: 0, delta: 4.5}\ngrid: {half_width: 5}\n"));
        FAIL("expected GridTooSmall");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridTooSmall);
        CHECK(std::string(e.what()).find("use half_width >=") != std::string::npos);
    }
    CHECK(throws_kind(ErrorKind::Config, [] { cmd_verify(config("family: yuen\nparams: {xi: 1, var_x: 1}\n")); }));

    ScanTable bad = g;
    bad.rows[0][bad.column_index("pass")] = 0.0;
    CHECK_FALSE(verification_passed(bad));
}

TEST_CASE("optimize rows") {
    const auto t = cmd_optimize(config("family: cat2\noptimizer: {n_starts: 64, fixed: {theta: 180}}\n"));
    REQUIRE(!t.rows.empty());
    CHECK(cell(t, 0, "lambda_min") >= 1.0 - 1e-12);
    CHECK(cell(t, 0, "contractive") == 0.0);
    CHECK(*t.meta("contractive") == "false");
    CHECK(cell(t, 0, "theta") == 180.0);
    CHECK(throws_kind(ErrorKind::Config, [] { cmd_optimize(config("family: yuen\n")); }));
}

TEST_CASE("tables are deterministic for a given config and seed") {
    setenv("SOURCE_DATE_EPOCH", "0", 1);
    const auto cfg = config("family: cat3\noptimizer: {n_starts: 32, fixed: {delta: 1.21}}\nthreads: 3\n");
    std::stringstream a, b;
    write_csv(cmd_optimize(cfg), a);
    auto cfg1 = cfg;
    cfg1.optimizer.threads = 1;
    write_csv(cmd_optimize(cfg1), b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("# seed=1") != std::string::npos);
    CHECK(a.str().find("# timestamp=1970-01-01T00:00:00Z") != std::string::npos);
}

TEST_CASE("command line exit codes") {
    CHECK(run_cli("eval --set family=gaussian") == 0);
    CHECK(run_cli("eval --set family=cat4") == 1);
    CHECK(run_cli("eval --no-such-flag") == 1);
    CHECK(run_cli("eval --set family=cat2 --set 'params={kappa: 1, theta: 180, delta: 1.0e-9}'") == 2);
    CHECK(run_cli("verify --set family=gaussian --set grid.n_points=1024 --set grid.half_width=385") == 3);

    const std::string path = "cli_roundtrip_test.json";
    REQUIRE(run_cli("scan --preset fig2 --format json --out " + path) == 0);
    std::ifstream in(path);
    const auto t = read_json(in);
    CHECK(t.rows.size() == 60 * 121);
    std::remove(path.c_str());
}
