#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "physkit.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "states.hpp"
#include "templates.hpp"

namespace udw {

enum class RateMethod { Quadrature, AnalyticVacuum, Expansion };

inline std::string_view to_string(RateMethod m) {
    switch (m) {
    case RateMethod::Quadrature: return "quadrature";
    case RateMethod::AnalyticVacuum: return "analytic-vacuum";
    case RateMethod::Expansion: return "expansion";
    }
    return "?";
}

// Rates are per unit lambda^2 in the first-quantized coupling convention,
// i.e. units of lambda^2 m when m = 1.
struct RateResult {
    double rate = 0;
    double abs_error_estimate = 0;
    TemplateModel model = TemplateModel::RelFirst;
    RateMethod method = RateMethod::Quadrature;
    DetectorParams params;
    Medium medium;
    double width_L = std::numeric_limits<double>::quiet_NaN();
    double mean_momentum = std::numeric_limits<double>::quiet_NaN();
    std::string coupling = "first-quantized";
    long evaluations = 0;
};

template <RadialWeight W>
RateResult rate_quadrature(TemplateModel model, const DetectorParams& d, const Medium& med, const W& state,
                           double rel_tol = 1e-9) {
    require_valid(d, med);
    if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3)) throw PreconditionError("rate_quadrature: rel_tol must be in [1e-12, 1e-3]");
    if constexpr (std::is_same_v<W, GaussianState>) require_valid(state);
    const Support sup = state.support(rel_tol * 1e-3);
    std::vector<double> breaks = sup.breakpoints;
    for (double b : template_breakpoints(model, d)) breaks.push_back(b);
    auto f = [&](double p) { return state.density(p) * template_function(model, d, med, p); };
    auto r = quad::integrate(f, sup.lo, sup.hi, quad::Options{0.0, rel_tol, 1'000'000}, breaks);
    const double scale = 1 / (2 * pi);
    if (!r.converged)
        throw ConvergenceError("rate_quadrature: no convergence within 1e6 evaluations for " + std::string(to_string(model)),
                               r.value * scale, r.abs_error * scale);
    RateResult out;
    out.rate = r.value * scale;
    out.abs_error_estimate = r.abs_error * scale;
    out.model = model;
    out.method = RateMethod::Quadrature;
    out.params = d;
    out.medium = med;
    if constexpr (std::is_same_v<W, GaussianState>) {
        out.width_L = state.width_L;
        out.mean_momentum = state.mean_momentum;
    }
    out.evaluations = r.evaluations;
    return out;
}

namespace rates_detail {

inline void require_relativistic_pair(TemplateModel model, const char* who) {
    if (model != TemplateModel::RelFirst && model != TemplateModel::RelSecondCorrected)
        throw PreconditionError(std::string(who) + ": only RelFirst and RelSecondCorrected have closed forms");
}

// (M_e^4 - M_g^4) in Compton units, without cancellation for small gaps.
inline double quartic_gap(double E) {
    const double Me = 1 + E;
    return E * (2 + E) * (Me * Me + 1);
}

} // namespace rates_detail

// Closed vacuum rates for p_D = 0, x = L^2 M_e^2 in Compton units:
//   RelFirst            L (M_e^4-M_g^4) / (8 pi^{3/2} sqrt2 M_e^2) e^{x/4} K1(x/4)
//   RelSecondCorrected  L (M_e^4-M_g^4) / (8 pi sqrt2 M_e^2) U(1/2, 0, x/2)
inline RateResult rate_analytic_vacuum(TemplateModel model, const DetectorParams& d, const GaussianState& state) {
    rates_detail::require_relativistic_pair(model, "rate_analytic_vacuum");
    require_valid(d, Medium::vacuum());
    require_valid(state);
    if (state.mean_momentum != 0) throw PreconditionError("rate_analytic_vacuum: requires p_D = 0");
    const double m = d.rest_mass, E = d.gap / m, L = state.width_L * m, Me = 1 + E;
    const double x = L * L * Me * Me;
    const double pre = L * rates_detail::quartic_gap(E) / (8 * pi * std::sqrt(2.0) * Me * Me);
    double rate = 0;
    if (model == TemplateModel::RelFirst)
        rate = pre / std::sqrt(pi) * bessel_k1_scaled(x / 4);
    else
        rate = pre * hyp_u(0.5, 0.0, x / 2);
    RateResult out;
    out.rate = rate * m;
    out.abs_error_estimate = 1e-13 * out.rate;
    out.model = model;
    out.method = RateMethod::AnalyticVacuum;
    out.params = d;
    out.medium = Medium::vacuum();
    out.width_L = state.width_L;
    out.mean_momentum = 0;
    return out;
}

// Large-L vacuum expansion: (M_e^4-M_g^4)/(8 pi M_e^3) (1 +- (3/2)/(L M_e)^2),
// + for RelFirst and - for RelSecondCorrected. order 0 and 1 give the
// leading term only (there is no odd term).
inline double rate_expansion_large_L(TemplateModel model, const DetectorParams& d, double L, int order = 2) {
    rates_detail::require_relativistic_pair(model, "rate_expansion_large_L");
    require_valid(d, Medium::vacuum());
    if (order < 0 || order > 2) throw PreconditionError("rate_expansion_large_L: order must be 0, 1 or 2");
    const double m = d.rest_mass, E = d.gap / m, Me = 1 + E;
    const double y = L * m * Me;
    if (!(y > 10)) throw PreconditionError("rate_expansion_large_L: needs L*M_e > 10");
    const double lead = rates_detail::quartic_gap(E) / (8 * pi * Me * Me * Me);
    const double sign = model == TemplateModel::RelFirst ? 1.0 : -1.0;
    const double corr = order == 2 ? sign * 1.5 / (y * y) : 0.0;
    return lead * (1 + corr) * m;
}

// Second-order coefficient of the large-L expansion in 1/(L M_e)^2.
inline double expansion_second_order_coefficient(TemplateModel model) {
    rates_detail::require_relativistic_pair(model, "expansion_second_order_coefficient");
    return model == TemplateModel::RelFirst ? 1.5 : -1.5;
}

// m -> 0 at fixed E and fixed L/lambda_c: the packet collapses onto p = 0
// and the rate tends to T(0)/2pi with M_g -> 0.
inline double rate_limit_small_mass(TemplateModel model, double E, const Medium& med) {
    if (!(E > 0)) throw DomainError("rate_limit_small_mass: E must be > 0");
    if (!(med.nu > 0 && med.nu <= 1)) throw DomainError("rate_limit_small_mass: nu must be in (0,1]");
    const double nu = med.nu;
    switch (model) {
    case TemplateModel::RelFirst: return E * nu / ((1 + nu) * (1 + nu)) / (2 * pi);
    case TemplateModel::RelSecondCorrected: return nu * E / (2 * (1 + nu)) / (2 * pi);
    case TemplateModel::SemiRel:
    case TemplateModel::NonRel: return 0.0;
    default: break;
    }
    throw PreconditionError("rate_limit_small_mass: model has no small-mass limit here");
}

inline double fractional_difference(double a, double b) {
    if (a == b) return 0.0;
    return 2 * std::fabs(a - b) / (std::fabs(a) + std::fabs(b));
}

} // namespace udw
