#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "physkit.hpp"
#include "quadrature.hpp"

namespace udw {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

struct EllArgs {
    double a = 0;
    double b = 0;
    double c2 = 0; // signed c^2
};

template <class Real>
struct EllParts {
    Real ell;      // (sqrt(r1) - sqrt(r2)) / 2
    Real root_sum; // sqrt(r1) + sqrt(r2)
    Real s1;       // sqrt((a+b)^2 + c2)
    Real s2;       // sqrt((a-b)^2 + c2)
};

namespace detail {

template <class Real>
Real clamped_root(Real r, Real scale, const char* which, Real a, Real b, Real c2, const char* context) {
    if (r >= 0) return std::sqrt(r);
    if (r >= -Real(1e-12) * scale) return 0;
    throw DomainError(std::string("ell: radicand ") + which + " = " + std::to_string(double(r)) +
                      " below clamp tolerance (a=" + std::to_string(double(a)) + ", b=" + std::to_string(double(b)) +
                      ", c2=" + std::to_string(double(c2)) + ")" + (context ? std::string(" in ") + context : ""));
}

} // namespace detail

// ell(a,b,c2) = (sqrt((a+b)^2+c2) - sqrt((a-b)^2+c2)) / 2, evaluated as
// 2ab / (sqrt(r1) + sqrt(r2)).
template <class Real = double>
EllParts<Real> ell_parts(Real a, Real b, Real c2, const char* context = nullptr) {
    const Real scale = (a + b) * (a + b) + std::abs(c2);
    const Real s1 = detail::clamped_root<Real>((a + b) * (a + b) + c2, scale, "(a+b)^2+c2", a, b, c2, context);
    const Real s2 = detail::clamped_root<Real>((a - b) * (a - b) + c2, scale, "(a-b)^2+c2", a, b, c2, context);
    const Real sum = s1 + s2;
    Real e = 0;
    if (a != 0 && b != 0) e = sum > 0 ? 2 * a * b / sum : std::min(a, b);
    return {e, sum, s1, s2};
}

inline double ell(const EllArgs& x, const char* context = nullptr) { return ell_parts<double>(x.a, x.b, x.c2, context).ell; }

struct BesselK01 {
    double k0; // e^x K0(x)
    double k1; // e^x K1(x)
};

// Exponentially scaled K0 and K1: power series for x <= 2, Steed/Temme
// continued fraction above.
inline BesselK01 bessel_k01_scaled(double x) {
    if (!(x > 0)) throw DomainError("bessel_k: argument must be > 0, got " + std::to_string(x));
    const double eps = std::numeric_limits<double>::epsilon();
    if (x <= 2) {
        const double t = x * x / 4, lg = std::log(x / 2);
        double i0 = 0, i1 = 0, s0 = 0, s1 = 0;
        double term0 = 1, term1 = 1; // t^k/(k!)^2 and t^k/(k!(k+1)!)
        double hk = 0;               // harmonic number H_k
        for (int k = 0; k < 60; ++k) {
            if (k > 0) {
                term0 *= t / (double(k) * k);
                term1 *= t / (double(k) * (k + 1));
                hk += 1.0 / k;
            }
            i0 += term0;
            i1 += term1;
            s0 += hk * term0;
            const double psi_sum = (hk - euler_gamma) + (hk + 1.0 / (k + 1) - euler_gamma);
            s1 += psi_sum * term1;
            if (term0 < eps * 1e-3 * i0 && k > 2) break;
        }
        i1 *= x / 2;
        const double k0 = -(lg + euler_gamma) * i0 + s0;
        const double k1 = 1 / x + lg * i1 - (x / 4) * s1;
        const double ex = std::exp(x);
        return {k0 * ex, k1 * ex};
    }
    const double a1 = 0.25;
    double b = 2 * (1 + x), d = 1 / b, h = d, delh = d;
    double q1 = 0, q2 = 1, q = a1, c = a1, a = -a1, s = 1 + q * delh;
    for (int i = 1; i < 100000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2;
        d = 1 / (b + a * d);
        delh = (b * d - 1) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < eps / 2) break;
    }
    h = a1 * h;
    const double k0 = std::sqrt(pi / (2 * x)) / s;
    const double k1 = k0 * (x + 0.5 - h) / x;
    return {k0, k1};
}

inline double bessel_k1_scaled(double x) { return bessel_k01_scaled(x).k1; }
inline double bessel_k0_scaled(double x) { return bessel_k01_scaled(x).k0; }

// sinh(x)/x. Overflows to inf past x ~ 710; use log_sinh_ratio there.
inline double sinh_ratio(double x) {
    x = std::fabs(x);
    if (x < 1e-4) {
        const double x2 = x * x;
        return 1 + x2 / 6 + x2 * x2 / 120;
    }
    return std::sinh(x) / x;
}

inline double log_sinh_ratio(double x) {
    x = std::fabs(x);
    if (x < 1e-4) {
        const double x2 = x * x;
        return std::log1p(x2 / 6 + x2 * x2 / 120);
    }
    if (x < 20) return std::log(std::sinh(x) / x);
    return x - std::log(2 * x) + std::log1p(-std::exp(-2 * x));
}

namespace detail {

// z^-a sum (a)_n (a-b+1)_n / n! (-z)^-n, if the terms drop below eps
// before they start growing.
inline bool hyp_u_asymptotic(double a, double b, double z, double& out) {
    const double eps = std::numeric_limits<double>::epsilon();
    double term = 1, sum = 1;
    for (int n = 0; n < 500; ++n) {
        const double next = term * (a + n) * (a - b + 1 + n) / ((n + 1) * -z);
        if (std::fabs(next) > std::fabs(term) && n > 0) return false;
        term = next;
        sum += term;
        if (std::fabs(term) < eps / 4 * std::fabs(sum)) {
            out = sum * std::pow(z, -a);
            return true;
        }
    }
    return false;
}

} // namespace detail

// Tricomi U(a,b,z) for a > 0, z > 0:
// (1/Gamma(a)) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
inline double hyp_u(double a, double b, double z) {
    if (!(a > 0)) throw DomainError("hyp_u: a must be > 0, got " + std::to_string(a));
    if (!(z > 0)) throw DomainError("hyp_u: z must be > 0, got " + std::to_string(z));
    double out;
    if (z > 15 && detail::hyp_u_asymptotic(a, b, z, out)) return out;

    const double c = b - a - 1;
    auto phi = [&](double t) { return -z * t + c * std::log1p(t); };
    // the t^{a-1} part of [0,1] is integrated exactly
    auto near = quad::tanh_sinh01([&](double t) { return std::pow(t, a - 1) * std::expm1(phi(t)); }, 1e-15);
    auto far = quad::exp_sinh1([&](double t) { return std::exp((a - 1) * std::log(t) + phi(t)); }, 1e-15);
    const double val = (1 / a + near.value + far.value) / std::tgamma(a);
    if (!near.converged || !far.converged)
        throw ConvergenceError("hyp_u: double-exponential quadrature did not converge", val,
                               (near.abs_error + far.abs_error) / std::tgamma(a));
    return val;
}

} // namespace udw
