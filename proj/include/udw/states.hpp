#pragma once

#include <cmath>
#include <concepts>
#include <vector>

#include "physkit.hpp"
#include "specfun.hpp"

namespace udw {

// Integration support for a radial weight: [lo, hi] holds all but the
// requested tail mass; breakpoints mark where the weight changes scale.
struct Support {
    double lo = 0;
    double hi = 0;
    std::vector<double> breakpoints;
};

// Any isotropic initial state reduced to a radial density w(p) with
// int_0^inf w = 1.
template <class W>
concept RadialWeight = requires(const W& w, double p, double tail) {
    { w.density(p) } -> std::convertible_to<double>;
    { w.support(tail) } -> std::same_as<Support>;
};

// psi(p) = (L^2/2pi)^{3/4} exp(-L^2 |p - p_D|^2 / 4). Only |p_D| is kept.
struct GaussianState {
    double width_L = 1.0;
    double mean_momentum = 0.0;

    double density(double p) const {
        const double L2 = width_L * width_L;
        const double norm = std::pow(L2 / (2 * pi), 1.5) * 4 * pi * p * p;
        const double alpha = L2 * p * mean_momentum;
        if (alpha > 700) {
            // exp(-L^2(p^2+p_D^2)/2) sinh(alpha)/alpha, regrouped
            const double d = p - mean_momentum;
            return norm * std::exp(-L2 * d * d / 2) * (-std::expm1(-2 * alpha)) / (2 * alpha);
        }
        return norm * std::exp(-L2 * (p * p + mean_momentum * mean_momentum) / 2) * sinh_ratio(alpha);
    }

    Support support(double tail) const;

    // <p^2> = 3/L^2 + p_D^2
    double mean_square_momentum() const { return 3 / (width_L * width_L) + mean_momentum * mean_momentum; }
};

inline double radial_weight(const GaussianState& s, double p) { return s.density(p); }

inline double truncation_radius(const GaussianState& s, double tail_mass) {
    if (!(tail_mass > 0 && tail_mass < 1)) throw PreconditionError("truncation_radius: tail mass must be in (0,1)");
    return s.mean_momentum + std::sqrt(2 * -std::log(tail_mass)) / s.width_L + 5 / s.width_L;
}

inline Support GaussianState::support(double tail) const {
    const double hi = truncation_radius(*this, tail);
    Support sup;
    sup.hi = hi;
    sup.lo = std::max(0.0, mean_momentum - (hi - mean_momentum));
    const double peak = std::max(mean_momentum, std::sqrt(2.0) / width_L);
    for (double x : {peak, peak - 3 / width_L, peak + 3 / width_L})
        if (x > sup.lo && x < sup.hi) sup.breakpoints.push_back(x);
    return sup;
}

static_assert(RadialWeight<GaussianState>);

inline void require_valid(const GaussianState& s) {
    if (!(s.width_L > 0) || !std::isfinite(s.width_L)) throw DomainError("GaussianState: width L must be > 0");
    if (!(s.mean_momentum >= 0)) throw DomainError("GaussianState: mean momentum magnitude must be >= 0");
}

} // namespace udw
