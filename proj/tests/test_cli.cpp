#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "udw/cli.hpp"

using namespace udw;
using namespace udw::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(UDW_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("udw_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> v;
    std::stringstream ss(csv);
    for (std::string line; std::getline(ss, line);)
        if (!line.empty() && line[0] != '#') v.push_back(line);
    return v;
}

} // namespace

TEST(Grid, Parse) {
    auto g = parse_grid("p_over_m:0.001:10:500:log");
    EXPECT_EQ(g.variable, "p_over_m");
    EXPECT_EQ(g.min, 1e-3);
    EXPECT_EQ(g.max, 10);
    EXPECT_EQ(g.count, 500);
    EXPECT_EQ(g.spacing, "log");
    EXPECT_EQ(parse_grid(g.str()).str(), g.str());
    auto v = make_grid(g);
    ASSERT_EQ(v.size(), 500u);
    EXPECT_EQ(v.front(), 1e-3);
    EXPECT_EQ(v.back(), 10);
    EXPECT_NEAR(v[1] / v[0], std::pow(1e4, 1.0 / 499), 1e-14);
    auto lin = make_grid(parse_grid("r:0:1:5:linear"));
    EXPECT_EQ(lin, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
    EXPECT_EQ(make_grid(parse_grid("p_over_m:2:2:1:log")), std::vector<double>{2});
}

TEST(Grid, Errors) {
    for (const char* bad : {"p_over_m:1:10:0:log", "p_over_m:10:1:5:log", "p_over_m:0:1:5:log", "p_over_m:1:2:5:cubic",
                            "p_over_m:1:2:5", "p_over_m:a:2:5:log", "p_over_m:1:2:2.5:log", "p_over_m:1:1:3:linear"})
        EXPECT_THROW(parse_grid(bad), UsageError) << bad;
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "1.0000000000000001e-01");
    EXPECT_EQ(format_double(1.0), "1.0000000000000000e+00");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    for (double v : {1e-300, 3.14159, 2.0 / 3, 6.02e23}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_THROW(parse_double("1,5", "x"), UsageError);
}

TEST(TemplateSweep, FigureShape) {
    auto s = preset("fig1a");
    auto t = run_template_sweep(s);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"p_over_m", "RelFirst", "RelSecondCorrected", "SemiRel", "NonRel", "Classical"}));
    EXPECT_EQ(t.rows.size(), 500u);
    const std::string csv = t.csv();
    EXPECT_EQ(csv.rfind("# ", 0), 0u);
    EXPECT_NE(csv.find("\"E_over_m\":[0.001]"), std::string::npos);
    EXPECT_EQ(data_lines(csv).size(), 501u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    // values are the library's
    EXPECT_EQ(t.rows[123][1], template_function(TemplateModel::RelFirst, {1, 1e-3}, Medium{1}, t.rows[123][0]));
}

TEST(TemplateSweep, SingleRowAndErrors) {
    SweepSpec s;
    s.grid = parse_grid("p_over_m:0.5:0.5:1:log");
    EXPECT_EQ(run_template_sweep(s).rows.size(), 1u);
    s.nu = {1.5};
    EXPECT_THROW(run_template_sweep(s), DomainError);
    s.nu = {1};
    s.grid = parse_grid("E_over_m:1:2:3:log");
    EXPECT_THROW(run_template_sweep(s), UsageError);
}

TEST(TemplateSweep, InteriorMaximumInFig2b) {
    auto t = run_template_sweep(preset("fig2b"));
    const int col = 2; // RelSecondCorrected
    bool found = false;
    for (std::size_t i = 1; i + 1 < t.rows.size(); ++i)
        found |= t.rows[i][col] > t.rows[i - 1][col] && t.rows[i][col] > t.rows[i + 1][col];
    EXPECT_TRUE(found);
}

TEST(RateSweep, ColumnsAndErrors) {
    auto s = preset("fig3b");
    s.grid.count = 4;
    auto t = run_rate_sweep(s);
    EXPECT_EQ(t.columns.size(), 1u + 2 * 4);
    EXPECT_EQ(t.columns[1], "RelFirst|nu=0.1|L=10");
    EXPECT_EQ(t.columns[2], "RelFirst|nu=0.1|L=10|err");
    EXPECT_EQ(t.failures, 0);
    for (auto& r : t.rows) {
        const double want = rate_quadrature(TemplateModel::RelFirst, {1, r[0]}, Medium{0.1}, GaussianState{10, 0}, 1e-9).rate;
        EXPECT_EQ(r[1], want);
        EXPECT_GE(r[2], 0);
    }
    SweepSpec bad = s;
    bad.E_over_m = {-1};
    bad.grid = parse_grid("L_over_lambda_c:1:2:2:log");
    try {
        run_rate_sweep(bad);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("row 0"), std::string::npos);
    }
    bad = s;
    bad.rel_tol = 1e-15;
    EXPECT_THROW(run_rate_sweep(bad), UsageError);
}

TEST(RateSweep, Fig5WidthFamily) {
    auto s = preset("fig5a");
    EXPECT_EQ(s.L, (std::vector<double>{0.1, 0.3, 1, 3, 10}));
    s.grid.count = 3;
    auto t = run_rate_sweep(s);
    for (auto& r : t.rows)
        for (int j = 0; j + 1 < 5; ++j) EXPECT_GE(r[1 + 2 * j], r[1 + 2 * (j + 1)]);
}

TEST(RateSweep, IndependentOfThreadCount) {
    auto s = preset("fig4b");
    s.grid.count = 7;
    ::setenv("UDW_THREADS", "1", 1);
    const std::string one = run_rate_sweep(s).csv();
    ::setenv("UDW_THREADS", "5", 1);
    const std::string five = run_rate_sweep(s).csv();
    ::unsetenv("UDW_THREADS");
    EXPECT_EQ(one, five);
    EXPECT_EQ(run_rate_sweep(s).csv(), five);
}

TEST(Json, SpecRoundTrip) {
    for (auto& n : preset_names()) {
        const auto s = preset(n);
        const auto back = spec_from_json(json::parse(to_json(s).dump()));
        EXPECT_EQ(to_json(back), to_json(s)) << n;
    }
    EXPECT_THROW(spec_from_json(json{{"subcommand", "rate"}}), UsageError);
    auto j = to_json(preset("fig1a"));
    j["models"] = {"Quantum"};
    EXPECT_THROW(spec_from_json(j), UsageError);
}

TEST(Json, TableJson) {
    SweepSpec s;
    s.grid = parse_grid("p_over_m:0.1:1:3:log");
    auto j = json::parse(run_template_sweep(s).json_text());
    EXPECT_EQ(j["columns"][1], "RelFirst");
    EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(Presets, Parameters) {
    EXPECT_EQ(preset_names().size(), 10u);
    EXPECT_EQ(preset("fig1b").E_over_m, std::vector<double>{10});
    EXPECT_EQ(preset("fig2a").nu, std::vector<double>{0.1});
    EXPECT_EQ(preset("fig2b").nu, std::vector<double>{0.9});
    EXPECT_EQ(preset("fig3a").L, std::vector<double>{0.1});
    EXPECT_EQ(preset("fig3a").nu, (std::vector<double>{0.1, 1}));
    EXPECT_EQ(preset("fig4a").models.size(), 5u);
    EXPECT_EQ(preset("fig5b").models, std::vector<TemplateModel>{TemplateModel::RelSecondCorrected});
    EXPECT_THROW(preset("fig6"), UsageError);
}

TEST(Models, Parse) {
    EXPECT_EQ(parse_models({"all"}).size(), 5u);
    EXPECT_EQ(parse_models({"relativistic", "NonRel"}).size(), 3u);
    EXPECT_THROW(parse_models({"Quantum"}), UsageError);
}

TEST(Compare, SelfIsZeroAndHydrogen) {
    SweepSpec s;
    s.models = {TemplateModel::RelFirst, TemplateModel::RelFirst};
    s.grid = parse_grid("L_over_lambda_c:10:1000:3:log");
    auto j = run_compare(s);
    for (auto& p : j["points"]) EXPECT_EQ(p["fractional_difference"].get<double>(), 0.0);
    const auto& h = j["hydrogen"];
    EXPECT_NEAR(h["L_times_Me"].get<double>(), 2.5175e5, 1e2);
    EXPECT_EQ(h["order_of_magnitude"].get<double>(), -10);
    EXPECT_NEAR(h["fractional_difference"].get<double>() / h["expansion_prediction"].get<double>(), 1, 1e-3);
}

TEST(Compare, MatchesExpansionAtHundred) {
    SweepSpec s;
    s.models = {TemplateModel::RelFirst, TemplateModel::RelSecondCorrected};
    s.E_over_m = {1e-3};
    s.grid = parse_grid("L_over_lambda_c:99.9000999000999:99.9000999000999:1:log");
    auto j = run_compare(s);
    const auto& p = j["points"][0];
    EXPECT_NEAR(p["L_times_Me"].get<double>(), 100, 1e-10);
    EXPECT_NEAR(p["fractional_difference"].get<double>(), 3e-4, 1e-6);
    EXPECT_EQ(p["method_a"], "analytic-vacuum");
    s.models = {TemplateModel::RelFirst};
    EXPECT_THROW(run_compare(s), UsageError);
}

TEST(Overlap, Table) {
    SweepSpec s;
    s.subcommand = "overlap";
    s.grid = parse_grid("r:0.1:20:20:log");
    auto t = run_overlap(s, true);
    EXPECT_EQ(t.columns.size(), 4u);
    for (auto& r : t.rows) EXPECT_LE(std::fabs(r[3] - r[1]), 1e-8 * r[1]);
    s.grid = parse_grid("p_over_m:0.1:20:20:log");
    EXPECT_THROW(run_overlap(s), UsageError);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_cli("template --grid p_over_m:0.1:1:3:log").code, 0);
    EXPECT_EQ(run_cli("template --grid p_over_m:1:0.1:3:log").code, 1);
    EXPECT_EQ(run_cli("template --model Quantum").code, 1);
    EXPECT_EQ(run_cli("nosuch").code, 1);
    EXPECT_EQ(run_cli("template --nu 1.5 --grid p_over_m:0.1:1:3:log").code, 2);
    EXPECT_EQ(run_cli("rate --E-over-m -1 --grid L_over_lambda_c:1:2:2:log").code, 2);
    EXPECT_EQ(run_cli("overlap --mass 0 --grid r:1:2:2:log").code, 2);
    EXPECT_EQ(run_cli("--version").code, 0);
}

TEST(Binary, DeterministicOutput) {
    const std::string args = "rate --model relativistic --nu 0.5 --grid E_over_m:0.01:1:4:log";
    auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(data_lines(a.out).size(), 5u);
    auto j = run_cli("template --format json --grid p_over_m:0.1:1:2:log");
    EXPECT_EQ(json::parse(j.out)["rows"].size(), 2u);
}

TEST(Binary, FigureAndReplay) {
    const auto dir = scratch("fig");
    ASSERT_EQ(run_cli("figure --preset fig2a --out-dir " + dir.string()).code, 0);
    ASSERT_TRUE(fs::exists(dir / "fig2a.csv"));
    ASSERT_TRUE(fs::exists(dir / "fig2a.manifest.json"));
    const auto m = json::parse(read_file((dir / "fig2a.manifest.json").string()));
    EXPECT_EQ(m["data_file"], "fig2a.csv");
    EXPECT_EQ(m["spec"]["preset"], "fig2a");
    EXPECT_TRUE(m.contains("git_describe"));
    const auto replay = dir / "replay.csv";
    ASSERT_EQ(run_cli("replay " + (dir / "fig2a.manifest.json").string() + " --out " + replay.string()).code, 0);
    EXPECT_EQ(read_file(replay.string()), read_file((dir / "fig2a.csv").string()));
    EXPECT_EQ(run_cli("figure --preset fig9 --out-dir " + dir.string()).code, 1);
    EXPECT_EQ(run_cli("replay " + (dir / "missing.json").string()).code, 2);
    fs::remove_all(dir.parent_path());
}
