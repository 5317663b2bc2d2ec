#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace udw {

// Bad physical input (negative radicand, invalid parameters).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Operation called outside its stated regime.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceError : std::runtime_error {
    double best_estimate;
    double achieved_error;
    ConvergenceError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), achieved_error(err) {}
};

// Natural units, hbar = c = 1. E_g = 0, so M_g = m and M_e = m + E.
struct DetectorParams {
    double rest_mass = 1.0;
    double gap = 1e-3;

    double ground_mass() const { return rest_mass; }
    double excited_mass() const { return rest_mass + gap; }
    double compton_wavelength() const { return 1.0 / rest_mass; }
};

struct Medium {
    double nu = 1.0;

    static Medium vacuum() { return Medium{1.0}; }
    bool is_vacuum() const { return nu == 1.0; }
    double omega(double k) const { return nu * std::fabs(k); }
};

struct Coupling {
    double lambda_first = 1.0;

    double lambda_second(const DetectorParams& d) const {
        const double mg = d.ground_mass(), me = d.excited_mass();
        return std::sqrt(2.0 * (mg * mg + me * me)) * lambda_first;
    }
};

enum class TemplateModel { RelFirst, RelSecondCorrected, RelSecondRaw, SemiRel, NonRel, Classical };

inline constexpr TemplateModel all_models[] = {
    TemplateModel::RelFirst, TemplateModel::RelSecondCorrected, TemplateModel::RelSecondRaw,
    TemplateModel::SemiRel,  TemplateModel::NonRel,             TemplateModel::Classical};

// The five models compared in the figures (raw second-quantized excluded).
inline constexpr TemplateModel figure_models[] = {
    TemplateModel::RelFirst, TemplateModel::RelSecondCorrected, TemplateModel::SemiRel,
    TemplateModel::NonRel, TemplateModel::Classical};

inline std::string_view to_string(TemplateModel m) {
    switch (m) {
    case TemplateModel::RelFirst: return "RelFirst";
    case TemplateModel::RelSecondCorrected: return "RelSecondCorrected";
    case TemplateModel::RelSecondRaw: return "RelSecondRaw";
    case TemplateModel::SemiRel: return "SemiRel";
    case TemplateModel::NonRel: return "NonRel";
    case TemplateModel::Classical: return "Classical";
    }
    return "?";
}

inline std::optional<TemplateModel> parse_model(std::string_view s) {
    for (auto m : all_models)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

// RelSecondRaw carries 1/energy instead of energy: its coupling has a
// different dimension and it is not comparable with the other models.
inline bool different_coupling_dimension(TemplateModel m) { return m == TemplateModel::RelSecondRaw; }

inline bool is_relativistic(TemplateModel m) {
    return m == TemplateModel::RelFirst || m == TemplateModel::RelSecondCorrected ||
           m == TemplateModel::RelSecondRaw;
}

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

inline ValidationReport validate(const DetectorParams& d, const Medium& med) {
    ValidationReport r;
    if (!(d.rest_mass > 0) || !std::isfinite(d.rest_mass)) r.issues.push_back("rest mass m must be > 0");
    if (!(d.gap > 0) || !std::isfinite(d.gap)) r.issues.push_back("gap E must be > 0");
    if (!(med.nu > 0)) r.issues.push_back("nu must be > 0");
    if (!(med.nu <= 1)) r.issues.push_back("nu must be <= 1");
    return r;
}

inline void require_valid(const DetectorParams& d, const Medium& med) {
    auto r = validate(d, med);
    if (r.ok()) return;
    std::string msg = "invalid parameters:";
    for (auto& s : r.issues) msg += " " + s + ";";
    throw DomainError(msg);
}

struct Dimensional {
    double p = 0.0;   // momentum
    double L = 0.0;   // packet width (length)
    double p_D = 0.0; // mean momentum
};

// Everything measured in units of m: E/m, p/m, L/lambda_c = L*m, p_D/m.
struct ComptonUnits {
    double gap_over_m = 0.0;
    double p_over_m = 0.0;
    double L_over_lambda_c = 0.0;
    double pD_over_m = 0.0;
};

inline ComptonUnits to_compton_units(const DetectorParams& d, const Dimensional& x = {}) {
    if (!(d.rest_mass > 0)) throw DomainError("to_compton_units: zero or negative rest mass");
    const double m = d.rest_mass;
    return {d.gap / m, x.p / m, x.L * m, x.p_D / m};
}

inline Dimensional from_compton_units(double rest_mass, const ComptonUnits& c) {
    if (!(rest_mass > 0)) throw DomainError("from_compton_units: zero or negative rest mass");
    return {c.p_over_m * rest_mass, c.L_over_lambda_c / rest_mass, c.pD_over_m * rest_mass};
}

// Hydrogen scale: Bohr radius over the hydrogen Compton wavelength, and the
// 2p -> 1s gap in units of the hydrogen rest energy.
struct HydrogenScale {
    double bohr_radius_m = 5.29177210903e-11;
    double rest_energy_MeV = 938.783;
    double hbar_c_MeV_fm = 197.3269804;
    double gap_eV = 10.2;

    double compton_wavelength_m() const { return hbar_c_MeV_fm / rest_energy_MeV * 1e-15; }
    double L_times_Me() const { return bohr_radius_m / compton_wavelength_m(); }
    double gap_over_m() const { return gap_eV / (rest_energy_MeV * 1e6); }
};

} // namespace udw
