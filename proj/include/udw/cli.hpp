#pragma once

// Sweep specifications, CSV/JSON emitters and figure presets behind the
// udw command-line tool. Needs nlohmann/json on the include path.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "localization.hpp"
#include "parallel.hpp"
#include "physkit.hpp"
#include "rates.hpp"
#include "states.hpp"
#include "templates.hpp"

namespace udw::cli {

using json = nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// 17 significant digits, '.' decimal point, no locale.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, r.ptr);
}

// Shortest round-trip form, for labels.
inline std::string short_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s, const char* what) {
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw UsageError(std::string("cannot parse ") + what + ": '" + s + "'");
    return v;
}

struct GridSpec {
    std::string variable = "p_over_m";
    double min = 1e-3;
    double max = 10;
    int count = 500;
    std::string spacing = "log";

    std::string str() const {
        return variable + ":" + short_double(min) + ":" + short_double(max) + ":" + std::to_string(count) + ":" + spacing;
    }
};

inline void validate(const GridSpec& g) {
    if (g.count < 1) throw UsageError("grid: count must be >= 1");
    if (g.count > 1 && !(g.min < g.max)) throw UsageError("grid: min must be < max when count > 1");
    if (g.spacing != "linear" && g.spacing != "log") throw UsageError("grid: spacing must be linear or log");
    if (g.spacing == "log" && !(g.min > 0)) throw UsageError("grid: log spacing needs min > 0");
    if (!std::isfinite(g.min) || !std::isfinite(g.max)) throw UsageError("grid: bounds must be finite");
}

inline GridSpec parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    if (parts.size() != 5) throw UsageError("grid must look like var:min:max:count:spacing, got '" + s + "'");
    GridSpec g;
    g.variable = parts[0];
    g.min = parse_double(parts[1], "grid min");
    g.max = parse_double(parts[2], "grid max");
    const double c = parse_double(parts[3], "grid count");
    if (c != std::floor(c) || c < 1 || c > 1e7) throw UsageError("grid: count must be a positive integer");
    g.count = static_cast<int>(c);
    g.spacing = parts[4];
    validate(g);
    return g;
}

inline std::vector<double> make_grid(const GridSpec& g) {
    validate(g);
    std::vector<double> v(g.count);
    if (g.count == 1) return {g.min};
    for (int i = 0; i < g.count; ++i) {
        const double t = double(i) / (g.count - 1);
        v[i] = g.spacing == "log" ? g.min * std::pow(g.max / g.min, t) : g.min + (g.max - g.min) * t;
    }
    v.front() = g.min;
    v.back() = g.max;
    return v;
}

struct SweepSpec {
    std::string subcommand = "template";
    std::vector<TemplateModel> models{TemplateModel::RelFirst};
    std::vector<double> E_over_m{1e-3};
    std::vector<double> nu{1.0};
    std::vector<double> L{10.0}; // L / lambda_c
    double pD = 0.0;             // p_D / m
    double mass = 1.0;           // overlap subcommand: M / m
    GridSpec grid;
    double rel_tol = 1e-9;
    std::string format = "csv";
    std::string preset;
};

inline json to_json(const SweepSpec& s) {
    json models = json::array();
    for (auto m : s.models) models.push_back(std::string(to_string(m)));
    return json{{"subcommand", s.subcommand}, {"models", models},     {"E_over_m", s.E_over_m},
                {"nu", s.nu},                 {"L_over_lambda_c", s.L}, {"pD_over_m", s.pD},
                {"mass", s.mass},             {"grid", s.grid.str()}, {"rel_tol", s.rel_tol},
                {"format", s.format},         {"preset", s.preset}};
}

inline SweepSpec spec_from_json(const json& j) {
    SweepSpec s;
    try {
        s.subcommand = j.at("subcommand").get<std::string>();
        s.models.clear();
        for (auto& m : j.at("models")) {
            auto t = parse_model(m.get<std::string>());
            if (!t) throw UsageError("unknown model '" + m.get<std::string>() + "'");
            s.models.push_back(*t);
        }
        s.E_over_m = j.at("E_over_m").get<std::vector<double>>();
        s.nu = j.at("nu").get<std::vector<double>>();
        s.L = j.at("L_over_lambda_c").get<std::vector<double>>();
        s.pD = j.at("pD_over_m").get<double>();
        s.mass = j.at("mass").get<double>();
        s.grid = parse_grid(j.at("grid").get<std::string>());
        s.rel_tol = j.at("rel_tol").get<double>();
        s.format = j.at("format").get<std::string>();
        s.preset = j.value("preset", "");
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed spec: ") + e.what());
    }
    return s;
}

inline std::vector<TemplateModel> parse_models(const std::vector<std::string>& names) {
    std::vector<TemplateModel> out;
    for (auto& n : names) {
        if (n == "all") {
            out.insert(out.end(), std::begin(figure_models), std::end(figure_models));
        } else if (n == "relativistic") {
            out.push_back(TemplateModel::RelFirst);
            out.push_back(TemplateModel::RelSecondCorrected);
        } else if (auto m = parse_model(n)) {
            out.push_back(*m);
        } else {
            throw UsageError("unknown model '" + n + "'");
        }
    }
    return out;
}

struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    int failures = 0; // rows/cells replaced by NaN after non-convergence

    std::string csv() const {
        std::string s;
        for (auto& c : comments) s += "# " + c + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        s += "\n";
        for (auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
            s += "\n";
        }
        return s;
    }

    std::string json_text() const {
        json rows_j = json::array();
        for (auto& r : rows) {
            json row = json::array();
            for (double v : r) row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
            rows_j.push_back(row);
        }
        return json{{"comments", comments}, {"columns", columns}, {"rows", rows_j}}.dump(1) + "\n";
    }

    std::string render(const std::string& format) const { return format == "json" ? json_text() : csv(); }
};

inline void check_common(const SweepSpec& s) {
    validate(s.grid);
    if (s.models.empty() && s.subcommand != "overlap") throw UsageError("at least one model is required");
    if (!(s.rel_tol >= 1e-12 && s.rel_tol <= 1e-3)) throw UsageError("rel-tol must be in [1e-12, 1e-3]");
    if (s.format != "csv" && s.format != "json") throw UsageError("format must be csv or json");
    if (s.E_over_m.empty() || s.nu.empty() || s.L.empty()) throw UsageError("E-over-m, nu and L need at least one value");
}

inline Table run_template_sweep(const SweepSpec& s) {
    check_common(s);
    if (s.grid.variable != "p_over_m") throw UsageError("template sweeps run over p_over_m");
    if (s.E_over_m.size() != 1 || s.nu.size() != 1) throw UsageError("template sweeps take a single E-over-m and nu");
    const DetectorParams d{1.0, s.E_over_m[0]};
    const Medium med{s.nu[0]};
    require_valid(d, med);
    const auto grid = make_grid(s.grid);
    Table t;
    t.comments.push_back("udw template sweep, units of m (RelSecondRaw in 1/m)");
    t.comments.push_back("spec " + to_json(s).dump());
    t.columns.push_back("p_over_m");
    for (auto m : s.models) t.columns.emplace_back(to_string(m));
    t.rows.assign(grid.size(), std::vector<double>(1 + s.models.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i][0] = grid[i];
    for (std::size_t j = 0; j < s.models.size(); ++j) {
        auto vals = template_sweep(s.models[j], d, med, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i][1 + j] = vals[i].second;
    }
    return t;
}

struct RateColumn {
    TemplateModel model;
    double nu;
    double fixed; // L when sweeping E, E when sweeping L
};

inline Table run_rate_sweep(const SweepSpec& s) {
    check_common(s);
    const bool over_E = s.grid.variable == "E_over_m";
    if (!over_E && s.grid.variable != "L_over_lambda_c")
        throw UsageError("rate sweeps run over E_over_m or L_over_lambda_c");
    const auto& fixed = over_E ? s.L : s.E_over_m;
    const char* fixed_name = over_E ? "L" : "E";
    std::vector<RateColumn> cols;
    for (auto m : s.models)
        for (double nu : s.nu)
            for (double f : fixed) cols.push_back({m, nu, f});
    const auto grid = make_grid(s.grid);
    Table t;
    t.comments.push_back("udw rate sweep, rates per lambda^2 in units of m, first-quantized coupling");
    t.comments.push_back("spec " + to_json(s).dump());
    t.columns.push_back(s.grid.variable);
    for (auto& c : cols) {
        const std::string base = std::string(to_string(c.model)) + "|nu=" + short_double(c.nu) + "|" + fixed_name + "=" +
                                 short_double(c.fixed);
        t.columns.push_back(base);
        t.columns.push_back(base + "|err");
    }
    struct Cell {
        double rate, err;
        bool failed;
    };
    const std::size_t nc = cols.size();
    auto cells = parallel_map<Cell>(grid.size() * nc, [&](std::size_t k) {
        const std::size_t i = k / nc, j = k % nc;
        const auto& c = cols[j];
        const double E = over_E ? grid[i] : c.fixed;
        const double L = over_E ? c.fixed : grid[i];
        const DetectorParams d{1.0, E};
        try {
            auto r = rate_quadrature(c.model, d, Medium{c.nu}, GaussianState{L, s.pD}, s.rel_tol);
            return Cell{r.rate, r.abs_error_estimate, false};
        } catch (const ConvergenceError&) {
            return Cell{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), true};
        } catch (const DomainError& e) {
            throw DomainError("row " + std::to_string(i) + ": " + e.what());
        }
    });
    t.rows.assign(grid.size(), std::vector<double>(1 + 2 * nc));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        t.rows[i][0] = grid[i];
        for (std::size_t j = 0; j < nc; ++j) {
            const auto& c = cells[i * nc + j];
            t.rows[i][1 + 2 * j] = c.rate;
            t.rows[i][2 + 2 * j] = c.err;
            if (c.failed) ++t.failures;
        }
    }
    return t;
}

inline Table run_overlap(const SweepSpec& s, bool with_oracle = false) {
    check_common(s);
    if (s.grid.variable != "r") throw UsageError("overlap sweeps run over r (separation, units of 1/m)");
    if (!(s.mass > 0)) throw DomainError("overlap: mass must be > 0");
    const auto grid = make_grid(s.grid);
    Table t;
    t.comments.push_back("udw overlap kernel M K1(M r)/((2 pi)^2 r), M=" + short_double(s.mass));
    t.comments.push_back("spec " + to_json(s).dump());
    t.columns = {"r", "kernel", "log_kernel"};
    if (with_oracle) t.columns.push_back("fourier_oracle");
    auto rows = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
        std::vector<double> row{grid[i], overlap_kernel(s.mass, grid[i]), log_overlap_kernel(s.mass, grid[i])};
        if (with_oracle) {
            try {
                row.push_back(overlap_fourier_oracle(s.mass, grid[i]));
            } catch (const ConvergenceError&) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        return row;
    });
    t.rows = std::move(rows);
    for (auto& r : t.rows)
        if (with_oracle && std::isnan(r.back())) ++t.failures;
    return t;
}

inline RateResult best_rate(TemplateModel m, double E, double nu, double L, double pD, double rel_tol) {
    const DetectorParams d{1.0, E};
    if (nu == 1.0 && pD == 0.0 && (m == TemplateModel::RelFirst || m == TemplateModel::RelSecondCorrected))
        return rate_analytic_vacuum(m, d, GaussianState{L, 0.0});
    return rate_quadrature(m, d, Medium{nu}, GaussianState{L, pD}, rel_tol);
}

inline json run_compare(const SweepSpec& s) {
    check_common(s);
    if (s.models.size() != 2) throw UsageError("compare needs exactly two models");
    if (s.grid.variable != "L_over_lambda_c") throw UsageError("compare sweeps run over L_over_lambda_c");
    if (s.E_over_m.size() != 1 || s.nu.size() != 1) throw UsageError("compare takes a single E-over-m and nu");
    const double E = s.E_over_m[0], nu = s.nu[0], Me = 1 + E;
    const auto a = s.models[0], b = s.models[1];
    const bool pair = (a == TemplateModel::RelFirst && b == TemplateModel::RelSecondCorrected) ||
                      (b == TemplateModel::RelFirst && a == TemplateModel::RelSecondCorrected);
    const auto grid = make_grid(s.grid);
    auto pts = parallel_map<json>(grid.size(), [&](std::size_t i) {
        const double L = grid[i];
        auto ra = best_rate(a, E, nu, L, s.pD, s.rel_tol);
        auto rb = a == b ? ra : best_rate(b, E, nu, L, s.pD, s.rel_tol);
        const double y = L * Me;
        json p{{"L_over_lambda_c", L},
               {"L_times_Me", y},
               {"rate_a", ra.rate},
               {"rate_b", rb.rate},
               {"method_a", std::string(to_string(ra.method))},
               {"method_b", std::string(to_string(rb.method))},
               {"fractional_difference", fractional_difference(ra.rate, rb.rate)}};
        if (pair && nu == 1.0 && y > 10) p["expansion_prediction"] = 3 / (y * y);
        return p;
    });
    const HydrogenScale h;
    const double y = h.L_times_Me(), Eh = h.gap_over_m(), L = y / (1 + Eh);
    const DetectorParams dh{1.0, Eh};
    const double r1 = rate_analytic_vacuum(TemplateModel::RelFirst, dh, GaussianState{L, 0}).rate;
    const double r2 = rate_analytic_vacuum(TemplateModel::RelSecondCorrected, dh, GaussianState{L, 0}).rate;
    const double fd = fractional_difference(r1, r2);
    json hyd{{"L_times_Me", y},
             {"E_over_m", Eh},
             {"rate_RelFirst", r1},
             {"rate_RelSecondCorrected", r2},
             {"fractional_difference", fd},
             {"expansion_prediction", 3 / (y * y)},
             {"order_of_magnitude", std::floor(std::log10(fd) + 0.5)}};
    return json{{"models", {std::string(to_string(a)), std::string(to_string(b))}},
                {"E_over_m", E},
                {"nu", nu},
                {"pD_over_m", s.pD},
                {"spec", to_json(s)},
                {"points", pts},
                {"hydrogen", hyd}};
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1a", "fig1b", "fig2a", "fig2b", "fig3a",
                                                "fig3b", "fig4a", "fig4b", "fig5a", "fig5b"};
    return names;
}

// Figure parameter sets. Axis ranges are repo conventions: log grids over
// [1e-3, 10] in p/m and E/m.
inline SweepSpec preset(const std::string& name) {
    SweepSpec s;
    s.preset = name;
    const GridSpec pgrid{"p_over_m", 1e-3, 10, 500, "log"};
    const GridSpec egrid{"E_over_m", 1e-3, 10, 61, "log"};
    const std::vector<TemplateModel> five(std::begin(figure_models), std::end(figure_models));
    const std::vector<TemplateModel> rel{TemplateModel::RelFirst, TemplateModel::RelSecondCorrected};
    if (name == "fig1a" || name == "fig1b" || name == "fig2a" || name == "fig2b") {
        s.subcommand = "template";
        s.models = five;
        s.grid = pgrid;
        s.E_over_m = {name == "fig1b" ? 10.0 : 1e-3};
        s.nu = {name == "fig2a" ? 0.1 : name == "fig2b" ? 0.9 : 1.0};
    } else if (name == "fig3a" || name == "fig3b") {
        s.subcommand = "rate";
        s.models = rel;
        s.grid = egrid;
        s.nu = {0.1, 1.0};
        s.L = {name == "fig3a" ? 0.1 : 10.0};
    } else if (name == "fig4a" || name == "fig4b") {
        s.subcommand = "rate";
        s.models = five;
        s.grid = egrid;
        s.nu = {1.0};
        s.L = {name == "fig4a" ? 0.1 : 10.0};
    } else if (name == "fig5a" || name == "fig5b") {
        s.subcommand = "rate";
        s.models = {name == "fig5a" ? TemplateModel::RelFirst : TemplateModel::RelSecondCorrected};
        s.grid = egrid;
        s.nu = {1.0};
        s.L = {0.1, 0.3, 1.0, 3.0, 10.0};
    } else {
        throw UsageError("unknown preset '" + name + "'");
    }
    return s;
}

inline Table run_spec(const SweepSpec& s, bool with_oracle = false) {
    if (s.subcommand == "template") return run_template_sweep(s);
    if (s.subcommand == "rate") return run_rate_sweep(s);
    if (s.subcommand == "overlap") return run_overlap(s, with_oracle);
    throw UsageError("cannot tabulate subcommand '" + s.subcommand + "'");
}

inline json manifest(const SweepSpec& s, const std::string& data_file, const std::string& git_describe) {
    return json{{"spec", to_json(s)},
                {"data_file", data_file},
                {"git_describe", git_describe},
                {"tolerances",
                 {{"rel_tol", s.rel_tol},
                  {"tail_mass", s.rel_tol * 1e-3},
                  {"max_evaluations", 1000000},
                  {"template_oracle_rel_tol", 1e-12}}},
                {"format", s.format},
                {"float_format", "17 significant digits, scientific"}};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace udw::cli
