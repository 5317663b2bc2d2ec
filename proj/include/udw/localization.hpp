#pragma once

#include <cmath>
#include <string>

#include "physkit.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "states.hpp"

namespace udw {

struct OverlapQuery {
    double mass = 1.0;       // M
    double separation = 1.0; // r = |x - y|
};

namespace localization_detail {

inline void check(double M, double r, const char* who) {
    if (!(M > 0)) throw DomainError(std::string(who) + ": mass must be > 0");
    if (!(r > 0)) throw DomainError(std::string(who) + ": separation must be > 0");
}

} // namespace localization_detail

// log of M K1(M r) / ((2 pi)^2 r)
inline double log_overlap_kernel(double M, double r) {
    localization_detail::check(M, r, "overlap_kernel");
    const double x = M * r;
    return std::log(M) - x + std::log(bessel_k1_scaled(x)) - std::log(4 * pi * pi * r);
}

// Second-quantized position overlap <x|y> = M K1(M r) / ((2 pi)^2 r).
inline double overlap_kernel(double M, double r) {
    localization_detail::check(M, r, "overlap_kernel");
    const double x = M * r;
    if (x > 700) return std::exp(log_overlap_kernel(M, r));
    return M * std::exp(-x) * bessel_k1_scaled(x) / (4 * pi * pi * r);
}

inline double overlap_kernel(const OverlapQuery& q) { return overlap_kernel(q.mass, q.separation); }

// The kernel from its defining Fourier integral,
//   (1/(4 pi^2 r)) int_0^inf p sin(p r) / E(p) dp
// = (1/(4 pi^2 r)) [1/r - int_0^inf sin(p r) M^2 / (E (E + p)) dp],
// in long double, summed over half periods of the sine with Wynn
// acceleration of the partial sums.
inline double overlap_fourier_oracle(double M, double r, double tol = 1e-10) {
    localization_detail::check(M, r, "overlap_fourier_oracle");
    using LD = long double;
    const LD x = LD(M) * LD(r);
    const LD half = 3.141592653589793238462643383279503L / x;
    auto g = [&](LD u) {
        const LD e = std::sqrt(u * u + 1);
        return std::sin(x * u) / (e * (e + u));
    };
    quad::WynnEpsilon<LD> wynn;
    LD partial = 0;
    auto bracket = [&](LD j) { return 1 / LD(r) - LD(M) * j; };
    int settled = 0;
    for (int n = 0; n < 2000; ++n) {
        auto seg = quad::integrate<LD>(g, n * half, (n + 1) * half, quad::Options{0.0, 2e-17, 5000});
        partial += seg.value;
        const LD est = wynn.add(partial);
        if (n < 8) continue;
        const LD b = bracket(est);
        if (LD(M) * wynn.change() <= LD(tol) * 1e-2L * std::abs(b)) {
            if (++settled >= 3) return double(b / (4 * 3.141592653589793238462643383279503L *
                                                    3.141592653589793238462643383279503L * LD(r)));
        } else {
            settled = 0;
        }
    }
    const double best = double(bracket(wynn.estimate()) / (4 * LD(pi) * LD(pi) * LD(r)));
    throw ConvergenceError("overlap_fourier_oracle: acceleration did not settle", best,
                           double(LD(M) * wynn.change() / (4 * LD(pi) * LD(pi) * LD(r))));
}

// -d ln K / dr by central differences; tends to M as M r grows.
inline double overlap_decay_rate(double M, double r, double h = 1e-3) {
    return -(log_overlap_kernel(M, r + h) - log_overlap_kernel(M, r - h)) / (2 * h);
}

// Gaussian smearing. Two unit-normalized Gaussians of width sigma pair into
// G_s(d) = (2 pi s)^{-3/2} exp(-d^2 / 2s), s = 2 sigma^2. Expanding the
// measure to second order gives
//   S(d) = (1/2M) [G_s(d) + (lambda_c^2/2) lap G_s(d)],
//   lap G_s = G_s (d^2/s^2 - 3/s),
// so on the diagonal S(0) = (1/2M) G_s(0) (1 - c2 (lambda_c/sigma)^2), c2 = 3/4.
struct ExpansionCoefficients {
    int order;
    double c0;
    double c2;
    std::string description;
};

inline ExpansionCoefficients compton_expansion_coefficients(int order = 2) {
    if (order < 0 || order > 2) throw PreconditionError("compton_expansion_coefficients: order must be 0..2");
    const double c2 = order == 2 ? 0.75 : 0.0;
    return {order, 1.0, c2,
            "diagonal Gaussian-smeared overlap = (1/2M) G(0) (1 - c2 (lambda_c/sigma)^2 + O((lambda_c/sigma)^4)), "
            "G(0) = 1/(8 pi^{3/2} sigma^3)"};
}

inline double gaussian_pair_kernel(double sigma, double d) {
    const double s = 2 * sigma * sigma;
    return std::pow(2 * pi * s, -1.5) * std::exp(-d * d / (2 * s));
}

inline double smeared_overlap_predicted(double M, double sigma, double d, int order = 2) {
    if (order < 0 || order > 2) throw PreconditionError("smeared_overlap_predicted: order must be 0..2");
    const double s = 2 * sigma * sigma;
    const double G = gaussian_pair_kernel(sigma, d);
    double v = G;
    if (order == 2) {
        const double lc2 = 1 / (M * M);
        v += 0.5 * lc2 * G * (d * d / (s * s) - 3 / s);
    }
    return v / (2 * M);
}

// First-quantized smeared overlap: the delta pairs to G_s(d) with the same
// 1/2M normalization.
inline double smeared_overlap_first(double M, double sigma, double d) { return gaussian_pair_kernel(sigma, d) / (2 * M); }

// Exact second-quantized smeared overlap: the pair Gaussian is reduced to
// its radial shell density around separation d and integrated against the
// kernel.
inline quad::Result<double> smeared_overlap_integrated(double M, double sigma, double d, double rel_tol = 1e-13) {
    if (!(M > 0 && sigma > 0 && d >= 0)) throw DomainError("smeared_overlap_integrated: need M, sigma > 0, d >= 0");
    const double s = 2 * sigma * sigma;
    const GaussianState shell{1 / std::sqrt(s), d};
    const Support sup = shell.support(1e-20);
    std::vector<double> breaks = sup.breakpoints;
    for (double f : {0.1, 1.0, 5.0, 20.0, 60.0}) breaks.push_back(f / M);
    auto r = quad::integrate([&](double u) { return shell.density(u) * overlap_kernel(M, u); }, sup.lo, sup.hi,
                             quad::Options{0.0, rel_tol, 1'000'000}, breaks);
    return r;
}

struct SmearedOverlap {
    double predicted;  // second-order Compton expansion
    double integrated; // exact kernel, by quadrature
    double integrated_error;
    double first_quantized;
};

inline SmearedOverlap compton_expansion(double M, double sigma, double d = 0.0, int order = 2) {
    if (!(M > 0 && sigma > 0)) throw DomainError("compton_expansion: M and sigma must be > 0");
    if (!(sigma * M >= 10)) throw PreconditionError("compton_expansion: needs sigma / lambda_c >= 10");
    auto r = smeared_overlap_integrated(M, sigma, d);
    if (!r.converged) throw ConvergenceError("compton_expansion: smeared quadrature did not converge", r.value, r.abs_error);
    return {smeared_overlap_predicted(M, sigma, d, order), r.value, r.abs_error, smeared_overlap_first(M, sigma, d)};
}

} // namespace udw
