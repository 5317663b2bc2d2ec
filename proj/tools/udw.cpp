// udw: template, rate, compare, overlap and figure sweeps.
// Exit codes: 0 ok, 1 usage, 2 domain/validation, 3 non-convergence.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "udw/cli.hpp"

#ifndef UDW_GIT_DESCRIBE
#define UDW_GIT_DESCRIBE "unknown"
#endif

namespace {

using namespace udw;
using namespace udw::cli;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
}

int finish(const Table& t, const std::string& format, const std::string& out) {
    emit(t.render(format), out);
    if (t.failures > 0) {
        std::cerr << "udw: " << t.failures << " point(s) did not converge (NaN in output)\n";
        return 3;
    }
    return 0;
}

int write_preset(const std::string& name, const std::string& dir) {
    const SweepSpec s = preset(name);
    const Table t = run_spec(s);
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string csv = name + ".csv";
    write_file((fs::path(dir) / csv).string(), t.csv());
    write_file((fs::path(dir) / (name + ".manifest.json")).string(), manifest(s, csv, UDW_GIT_DESCRIBE).dump(2) + "\n");
    std::cerr << "udw: wrote " << (fs::path(dir) / csv).string() << "\n";
    return t.failures > 0 ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unruh-DeWitt detector template functions and emission rates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(UDW_GIT_DESCRIBE));

    std::vector<std::string> models{"all"};
    std::vector<double> E{1e-3}, nu{1.0}, L{10.0};
    double pD = 0, mass = 1, rel_tol = 1e-9;
    std::string grid, out, format = "csv", preset_name, out_dir = ".", manifest_path;
    bool with_oracle = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", out, "Output file (default stdout)");
        c->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* tpl = app.add_subcommand("template", "Template function T(p) sweep over p/m");
    tpl->add_option("--model", models, "Models: names, 'all' or 'relativistic'");
    tpl->add_option("--E-over-m", E, "Gap E/m")->expected(1);
    tpl->add_option("--nu", nu, "Field propagation speed")->expected(1);
    tpl->add_option("--grid", grid, "var:min:max:count:spacing (var p_over_m)");
    add_common(tpl);

    auto* rate = app.add_subcommand("rate", "Emission rate sweep over E/m or L/lambda_c");
    rate->add_option("--model", models, "Models: names, 'all' or 'relativistic'");
    rate->add_option("--E-over-m", E, "Gap(s) E/m (held fixed when sweeping L)");
    rate->add_option("--nu", nu, "Propagation speed(s)");
    rate->add_option("--L", L, "Packet width(s) L/lambda_c (held fixed when sweeping E)");
    rate->add_option("--pD", pD, "Mean momentum p_D/m");
    rate->add_option("--grid", grid, "var:min:max:count:spacing (var E_over_m or L_over_lambda_c)");
    rate->add_option("--rel-tol", rel_tol, "Quadrature relative tolerance");
    add_common(rate);

    auto* cmp = app.add_subcommand("compare", "Fractional rate difference between two models (json)");
    cmp->add_option("--model", models, "Exactly two models")->expected(2);
    cmp->add_option("--E-over-m", E, "Gap E/m")->expected(1);
    cmp->add_option("--nu", nu, "Propagation speed")->expected(1);
    cmp->add_option("--pD", pD, "Mean momentum p_D/m");
    cmp->add_option("--grid", grid, "L_over_lambda_c:min:max:count:spacing");
    cmp->add_option("--rel-tol", rel_tol, "Quadrature relative tolerance");
    cmp->add_option("--out", out, "Output file (default stdout)");

    auto* ovl = app.add_subcommand("overlap", "Second-quantized position overlap kernel");
    ovl->add_option("--mass", mass, "Mass M in units of m");
    ovl->add_option("--grid", grid, "r:min:max:count:spacing");
    ovl->add_flag("--oracle", with_oracle, "Add the Fourier-integral oracle column");
    add_common(ovl);

    auto* fig = app.add_subcommand("figure", "Write a figure preset as CSV plus manifest");
    fig->add_option("--preset", preset_name, "fig1a..fig5b or all")->required();
    fig->add_option("--out-dir", out_dir, "Output directory");

    auto* rep = app.add_subcommand("replay", "Re-run the sweep recorded in a manifest");
    rep->add_option("manifest", manifest_path, "Manifest JSON")->required();
    rep->add_option("--out", out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        SweepSpec s;
        s.models = parse_models(models);
        s.E_over_m = E;
        s.nu = nu;
        s.L = L;
        s.pD = pD;
        s.mass = mass;
        s.rel_tol = rel_tol;
        s.format = format;
        if (tpl->parsed()) {
            s.subcommand = "template";
            s.grid = grid.empty() ? GridSpec{"p_over_m", 1e-3, 10, 500, "log"} : parse_grid(grid);
            return finish(run_template_sweep(s), format, out);
        }
        if (rate->parsed()) {
            s.subcommand = "rate";
            s.grid = grid.empty() ? GridSpec{"E_over_m", 1e-3, 10, 61, "log"} : parse_grid(grid);
            return finish(run_rate_sweep(s), format, out);
        }
        if (cmp->parsed()) {
            s.subcommand = "compare";
            s.format = "json";
            if (models == std::vector<std::string>{"all"})
                s.models = {TemplateModel::RelFirst, TemplateModel::RelSecondCorrected};
            s.grid = grid.empty() ? GridSpec{"L_over_lambda_c", 10, 1000, 5, "log"} : parse_grid(grid);
            emit(run_compare(s).dump(2) + "\n", out);
            return 0;
        }
        if (ovl->parsed()) {
            s.subcommand = "overlap";
            s.grid = grid.empty() ? GridSpec{"r", 0.1, 20, 20, "log"} : parse_grid(grid);
            return finish(run_overlap(s, with_oracle), format, out);
        }
        if (fig->parsed()) {
            if (preset_name != "all") return write_preset(preset_name, out_dir);
            int code = 0;
            for (auto& n : preset_names()) code = std::max(code, write_preset(n, out_dir));
            return code;
        }
        if (rep->parsed()) {
            const auto j = json::parse(read_file(manifest_path));
            const SweepSpec r = spec_from_json(j.at("spec"));
            return finish(run_spec(r), r.format, out);
        }
    } catch (const UsageError& e) {
        std::cerr << "udw: usage: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "udw: usage: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "udw: no convergence: " << e.what() << " (best " << e.best_estimate << ", error "
                  << e.achieved_error << ")\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "udw: domain error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "udw: precondition: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "udw: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
