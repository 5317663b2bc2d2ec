#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "physkit.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace udw {

struct TemplateQuery {
    TemplateModel model = TemplateModel::RelFirst;
    DetectorParams params;
    Medium medium;
    double p = 0; // momentum magnitude
};

namespace templates {

// Everything in this namespace works in Compton units (m = 1); E is E/m.

// (p - ell(p, b, c2)) / p without cancellation, including p -> 0.
inline double complement(double p, double b, double c2, const char* context) {
    const auto e = ell_parts<double>(p, b, c2, context);
    if (p < b) {
        const double ell_over_p = 2 * b / e.root_sum;
        return c2 * (1 + ell_over_p) / ((e.s2 + b - p) * (p + b + e.s1));
    }
    return (-c2 / (p + b + e.s1) + (p - b) + e.s2) / (2 * p);
}

// Endpoints of the emission window in k and R = (k_A - k_B)/p for the
// relativistic dispersion, written without subtractive cancellation.
struct RelWindow {
    double k_lo; // k_B
    double k_hi; // k_A
    double R;
    double Ee;
};

inline RelWindow rel_window(double E, double nu, double p) {
    const double Me = 1 + E;
    const double Ee = std::hypot(p, Me);
    const double eps = (1 - nu) * (1 + nu);
    const double delta = E * (2 + E); // Me^2 - Mg^2
    const double bA = nu * Ee - p, bB = nu * Ee + p;
    const double sA = std::sqrt(bA * bA + eps * delta), sB = std::sqrt(bB * bB + eps * delta);
    const double dA = bA >= 0 ? bA + sA : eps * delta / (sA - bA);
    const double dB = bB + sB;
    const double R = 2 * delta * (1 + 2 * nu * Ee / (sA + sB)) / (dA * dB);
    return {delta / dB, delta / dA, R, Ee};
}

inline double vacuum_closed_form(TemplateModel model, double E, double p) {
    const double Me = 1 + E, Me2 = Me * Me;
    const double delta = E * (2 + E);
    const double Ee = std::hypot(p, Me);
    switch (model) {
    case TemplateModel::RelFirst: return 0.25 * delta * (Me2 + 1) / (Me2 * Me2) * Ee;
    case TemplateModel::RelSecondRaw: return 0.125 * delta / Me2 / Ee;
    case TemplateModel::RelSecondCorrected: return 0.25 * delta * (Me2 + 1) / Me2 / Ee;
    default: break;
    }
    throw PreconditionError("vacuum_closed_form: relativistic models only");
}

inline double relativistic(TemplateModel model, double E, double nu, double p) {
    if (nu == 1.0) return vacuum_closed_form(model, E, p);
    const auto w = rel_window(E, nu, p);
    const double Me = 1 + E;
    switch (model) {
    case TemplateModel::RelFirst: {
        const double eg_hi = std::hypot(w.k_hi - p, 1.0), eg_lo = std::hypot(w.k_lo + p, 1.0);
        return 0.5 * nu * w.R * (eg_hi + eg_lo) / 2;
    }
    case TemplateModel::RelSecondRaw: return nu * w.R / (8 * w.Ee);
    case TemplateModel::RelSecondCorrected: return nu * w.R * (1 + Me * Me) / (4 * w.Ee);
    default: break;
    }
    throw PreconditionError("relativistic template: unexpected model");
}

inline double semi_relativistic(double E, double nu, double p) {
    const double Me = 1 + E;
    const double c2 = 2 * E - p * p * E / Me;
    if (c2 >= 0) return nu * complement(p, nu, c2, "SemiRel");
    // past p^2 = 2 M_g M_e only the window [k_A-, k_A+] survives
    const double r = (p - nu) * (p - nu) + c2;
    if (r < 0) throw DomainError("SemiRel: negative kinematic radicand at p=" + std::to_string(p));
    return nu * std::sqrt(r) / p;
}

inline double non_relativistic(double E, double nu, double p) { return nu * complement(p, nu, 2 * E, "NonRel"); }

inline double compton(TemplateModel model, double E, double nu, double p) {
    switch (model) {
    case TemplateModel::Classical: return E / nu;
    case TemplateModel::NonRel: return non_relativistic(E, nu, p);
    case TemplateModel::SemiRel: return semi_relativistic(E, nu, p);
    default: return relativistic(model, E, nu, p);
    }
}

// The ell-based closed forms as written with ell (RelFirst uses the root
// sum in its last term). Only meaningful for nu < 1 and p > 0 in the
// relativistic models; kept as an independent evaluation path.
template <class Real>
Real direct_form(TemplateModel model, Real E, Real nu, Real p) {
    const Real Me = 1 + E;
    const Real Ee = std::sqrt(p * p + Me * Me);
    const Real eps = (1 - nu) * (1 + nu);
    switch (model) {
    case TemplateModel::Classical: return E / nu;
    case TemplateModel::NonRel: {
        const auto e = ell_parts<Real>(p, nu, 2 * E);
        return nu / p * (p - e.ell);
    }
    case TemplateModel::SemiRel: {
        const auto e = ell_parts<Real>(p, nu, 2 * E - p * p * E / Me);
        return nu / p * (p - e.ell);
    }
    default: break;
    }
    const auto e = ell_parts<Real>(nu * p, Ee, -eps);
    switch (model) {
    case TemplateModel::RelFirst:
        return nu / (eps * eps) * ((1 + nu * nu) * Ee - Ee / p * e.ell - nu * e.root_sum / 2);
    case TemplateModel::RelSecondRaw: return nu * (p - e.ell) / (4 * eps * p * Ee);
    case TemplateModel::RelSecondCorrected: return nu * (1 + Me * Me) * (p - e.ell) / (2 * eps * p * Ee);
    default: break;
    }
    return 0;
}

inline std::string describe(TemplateModel model, double E, double nu, double p) {
    return std::string(to_string(model)) + " at E/m=" + std::to_string(E) + ", nu=" + std::to_string(nu) +
           ", p/m=" + std::to_string(p);
}

} // namespace templates

// T(p) for physical parameters. Energy-dimension models scale as
// m * T(p/m; E/m); RelSecondRaw as T(p/m; E/m) / m.
inline double template_function(TemplateModel model, const DetectorParams& d, const Medium& med, double p) {
    require_valid(d, med);
    if (!(p >= 0) || !std::isfinite(p)) throw DomainError("template: momentum must be finite and >= 0");
    const double m = d.rest_mass;
    try {
        const double t = templates::compton(model, d.gap / m, med.nu, p / m);
        return model == TemplateModel::RelSecondRaw ? t / m : t * m;
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " [" + templates::describe(model, d.gap / m, med.nu, p / m) + "]");
    }
}

inline double template_function(const TemplateQuery& q) { return template_function(q.model, q.params, q.medium, q.p); }

struct OracleResult {
    double value = 0;
    double abs_error = 0;
    double k_lo = 0; // integration window in k (Compton units)
    double k_hi = 0;
};

namespace templates {

// Detector dispersion and measures used by the brute-force oracle.
struct OracleModel {
    bool relativistic;
    bool second_quantized;
    double Mg, Me, E, nu;

    double excited_energy(double p) const { return relativistic ? std::hypot(p, Me) : p * p / (2 * Me) + E; }
    double ground_min() const { return relativistic ? Mg : 0.0; }
    double ground_energy(double q) const { return relativistic ? std::hypot(q, Mg) : q * q / (2 * Mg); }
    double ground_slope(double q) const { return relativistic ? q / std::hypot(q, Mg) : q / Mg; }
    // q^2 such that E_g(q) = e
    double q2_at(double e) const { return relativistic ? (e - Mg) * (e + Mg) : 2 * Mg * e; }
    // q / E_g'(q) expressed through e = E_g(q)
    double jacobian(double e) const { return relativistic ? e : Mg; }
    double measure(double e) const { return second_quantized ? 2 * e : 1.0; }
};

inline OracleModel oracle_model(TemplateModel model, double E, double nu) {
    switch (model) {
    case TemplateModel::RelFirst: return {true, false, 1, 1 + E, E, nu};
    case TemplateModel::RelSecondRaw:
    case TemplateModel::RelSecondCorrected: return {true, true, 1, 1 + E, E, nu};
    case TemplateModel::SemiRel: return {false, false, 1, 1 + E, E, nu};
    case TemplateModel::NonRel: return {false, false, 1, 1, E, nu};
    case TemplateModel::Classical: break;
    }
    throw PreconditionError("template_oracle: the classical model has no momentum integral");
}

// Emission root at p = 0: E_g(k) + nu k = E_e(0), by bisection.
inline double oracle_root_p0(const OracleModel& om) {
    const double e0 = om.excited_energy(0);
    const double kmax = (e0 - om.ground_min()) / om.nu;
    return quad::bisect([&](double k) { return om.ground_energy(k) + om.nu * k - e0; }, 0.0, kmax);
}

inline OracleResult oracle_compton(TemplateModel model, double E, double nu, double p, double rel_tol = 1e-12) {
    const auto om = oracle_model(model, E, nu);
    const double coupling = model == TemplateModel::RelSecondCorrected ? 2 * (om.Mg * om.Mg + om.Me * om.Me) : 1.0;
    const double ee = om.excited_energy(p);
    const double fe2 = om.second_quantized ? 2 * ee : 1.0;
    OracleResult out;
    if (p < 1e-6) {
        const double k = oracle_root_p0(om);
        const double e = om.ground_energy(k);
        out.value = coupling * nu * k / (fe2 * om.measure(e) * (om.ground_slope(k) + nu));
        out.k_lo = out.k_hi = k;
        return out;
    }
    const double kmax = (ee - om.ground_min()) / nu;
    auto gB = [&](double k) { return (k + p) * (k + p) - om.q2_at(ee - nu * k); };
    auto gA = [&](double k) { return om.q2_at(ee - nu * k) - (k - p) * (k - p); };
    const double kB = gB(0) >= 0 ? 0.0 : quad::bisect(gB, 0.0, kmax);
    const double kpk = quad::golden_max(gA, 0.0, kmax);
    if (!(gA(kpk) > 0)) return out;
    const double kA_lo = gA(0) >= 0 ? 0.0 : quad::bisect(gA, 0.0, kpk);
    const double kA_hi = quad::bisect(gA, kpk, kmax);
    const double lo = std::max(kB, kA_lo), hi = kA_hi;
    out.k_lo = lo;
    out.k_hi = hi;
    if (!(hi > lo)) return out;
    auto integrand = [&](double k) {
        const double e = ee - nu * k;
        return nu * om.jacobian(e) / (2 * p * fe2 * om.measure(e));
    };
    auto r = quad::integrate(integrand, lo, hi, quad::Options{0.0, rel_tol, 1'000'000});
    if (!r.converged)
        throw ConvergenceError("template_oracle: window quadrature did not converge [" + describe(model, E, nu, p) + "]",
                               coupling * r.value, coupling * r.abs_error);
    out.value = coupling * r.value;
    out.abs_error = coupling * r.abs_error;
    return out;
}

} // namespace templates

// Brute-force T(p): the energy delta is resolved in the angle and the
// remaining k integral done by adaptive quadrature over the emission window.
inline double template_oracle(const TemplateQuery& q) {
    require_valid(q.params, q.medium);
    if (!(q.p >= 0)) throw DomainError("template_oracle: momentum must be >= 0");
    const double m = q.params.rest_mass;
    const double t = templates::oracle_compton(q.model, q.params.gap / m, q.medium.nu, q.p / m).value;
    return q.model == TemplateModel::RelSecondRaw ? t / m : t * m;
}

// Points where a template is not smooth (quadrature breakpoints), in
// physical momentum.
inline std::vector<double> template_breakpoints(TemplateModel model, const DetectorParams& d) {
    if (model == TemplateModel::SemiRel) return {std::sqrt(2 * d.ground_mass() * d.excited_mass())};
    return {};
}

inline std::vector<std::pair<double, double>> template_sweep(TemplateModel model, const DetectorParams& d,
                                                              const Medium& med, const std::vector<double>& grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0)) throw DomainError("template_sweep: grid point " + std::to_string(i) + " is negative");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("template_sweep: grid not strictly increasing at index " + std::to_string(i));
    }
    return parallel_map<std::pair<double, double>>(grid.size(), [&](std::size_t i) {
        try {
            return std::make_pair(grid[i], template_function(model, d, med, grid[i]));
        } catch (const DomainError& e) {
            throw DomainError("grid index " + std::to_string(i) + ": " + e.what());
        }
    });
}

struct LocalMaximum {
    double p;
    double value;
};

// First interior local maximum of T on (p_lo, p_hi): scan a log grid, then
// refine the bracketing cell by golden section.
inline std::optional<LocalMaximum> locate_local_maximum(TemplateModel model, const DetectorParams& d, const Medium& med,
                                                        double p_lo, double p_hi, int n_grid = 2000) {
    if (!(p_lo > 0 && p_hi > p_lo) || n_grid < 3) throw PreconditionError("locate_local_maximum: need 0 < p_lo < p_hi");
    std::vector<double> ps(n_grid), ts(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        ps[i] = p_lo * std::pow(p_hi / p_lo, double(i) / (n_grid - 1));
        ts[i] = template_function(model, d, med, ps[i]);
    }
    for (int i = 1; i + 1 < n_grid; ++i) {
        if (ts[i] > ts[i - 1] && ts[i] >= ts[i + 1]) {
            const double p = quad::golden_max([&](double x) { return template_function(model, d, med, x); },
                                              ps[i - 1], ps[i + 1]);
            return LocalMaximum{p, template_function(model, d, med, p)};
        }
    }
    return std::nullopt;
}

} // namespace udw
