#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "udw/rates.hpp"

using namespace udw;
using TM = TemplateModel;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double quad_rate(TM m, double E, double nu, double L, double pD = 0, double tol = 1e-9, double mass = 1) {
    return rate_quadrature(m, {mass, E}, Medium{nu}, GaussianState{L, pD}, tol).rate;
}

const TM relativistic[] = {TM::RelFirst, TM::RelSecondCorrected};

} // namespace

TEST(Rates, ClassicalIdentity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10; ++i) {
        const double E = std::pow(10.0, -4 + 4 * u(rng)), nu = 0.05 + 0.95 * u(rng);
        GaussianState s{std::pow(10.0, -1 + 3 * u(rng)), 5 * u(rng)};
        auto r = rate_quadrature(TM::Classical, {1, E}, Medium{nu}, s, 1e-12);
        EXPECT_LE(rel(r.rate, E / nu / (2 * pi)), 1e-12);
        EXPECT_EQ(r.coupling, "first-quantized");
        EXPECT_EQ(r.method, RateMethod::Quadrature);
    }
}

TEST(Rates, AnalyticMatchesQuadrature) {
    // E/m = 0.001, L/lambda_c = 10 first
    for (auto m : relativistic) {
        const double a = rate_analytic_vacuum(m, {1, 0.001}, {10, 0}).rate;
        EXPECT_LE(rel(quad_rate(m, 0.001, 1, 10), a), 1e-9);
    }
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 20; ++i) {
        const double E = std::pow(10.0, -4 + 5 * u(rng)), L = std::pow(10.0, -1 + 3 * u(rng));
        for (auto m : relativistic) {
            const double a = rate_analytic_vacuum(m, {1, E}, {L, 0}).rate;
            EXPECT_LE(rel(quad_rate(m, E, 1, L, 0, 1e-11), a), 1e-9) << to_string(m) << " E=" << E << " L=" << L;
        }
    }
}

TEST(Rates, AnalyticWithPhysicalMass) {
    // rate scales as m at fixed E/m and L m
    for (auto m : relativistic) {
        const double a = rate_analytic_vacuum(m, {3.0, 0.03}, {2.0, 0}).rate;
        const double b = rate_analytic_vacuum(m, {1.0, 0.01}, {6.0, 0}).rate;
        EXPECT_LE(rel(a, 3 * b), 1e-14);
        EXPECT_LE(rel(quad_rate(m, 0.03, 1, 2.0, 0, 1e-10, 3.0), a), 1e-9);
    }
}

TEST(Rates, AnalyticPreconditions) {
    EXPECT_THROW(rate_analytic_vacuum(TM::SemiRel, {1, 0.1}, {1, 0}), PreconditionError);
    EXPECT_THROW(rate_analytic_vacuum(TM::RelFirst, {1, 0.1}, {1, 0.5}), PreconditionError);
    EXPECT_THROW(rate_quadrature(TM::RelFirst, {1, 0.1}, Medium{1}, GaussianState{1, 0}, 1e-14), PreconditionError);
    EXPECT_THROW(rate_quadrature(TM::RelFirst, {1, 0.1}, Medium{1}, GaussianState{1, 0}, 1e-2), PreconditionError);
    EXPECT_THROW(rate_quadrature(TM::RelFirst, {1, 0.1}, Medium{1}, GaussianState{-1, 0}), DomainError);
    EXPECT_THROW(rate_quadrature(TM::RelFirst, {1, -0.1}, Medium{1}, GaussianState{1, 0}), DomainError);
    EXPECT_THROW(rate_expansion_large_L(TM::RelFirst, {1, 0.001}, 5.0), PreconditionError);
    EXPECT_THROW(rate_expansion_large_L(TM::RelFirst, {1, 0.001}, 50.0, 3), PreconditionError);
}

TEST(Rates, ErrorEstimateShrinksWithTolerance) {
    for (auto m : {TM::RelFirst, TM::SemiRel, TM::NonRel}) {
        auto loose = rate_quadrature(m, {1, 0.01}, Medium{0.5}, GaussianState{0.3, 1.0}, 1e-6);
        auto tight = rate_quadrature(m, {1, 0.01}, Medium{0.5}, GaussianState{0.3, 1.0}, 1e-9);
        EXPECT_LT(tight.abs_error_estimate, loose.abs_error_estimate) << to_string(m);
        EXPECT_LE(tight.abs_error_estimate, 1e-9 * tight.rate);
        EXPECT_LE(rel(loose.rate, tight.rate), 1e-6);
    }
}

TEST(Rates, LargeWidthExpansion) {
    const double E = 0.001, Me = 1 + E;
    for (auto m : relativistic) {
        double prev_rem = 0, prev_y = 0;
        for (double y : {50.0, 100.0, 200.0}) {
            const double L = y / Me;
            const double a = rate_analytic_vacuum(m, {1, E}, {L, 0}).rate;
            const double rem = std::fabs(a - rate_expansion_large_L(m, {1, E}, L, 2)) / a;
            EXPECT_LE(rem, 10 / std::pow(y, 4)) << to_string(m) << " y=" << y;
            if (prev_y > 0) { EXPECT_GE(std::log(prev_rem / rem) / std::log(y / prev_y), 3.8); }
            prev_rem = rem;
            prev_y = y;
            // signed second-order coefficient from the exact rate
            const double c = (a / rate_expansion_large_L(m, {1, E}, L, 0) - 1) * y * y;
            EXPECT_NEAR(c, expansion_second_order_coefficient(m), 0.015) << to_string(m) << " y=" << y;
        }
    }
    EXPECT_EQ(rate_expansion_large_L(TM::RelFirst, {1, E}, 100, 0), rate_expansion_large_L(TM::RelSecondCorrected, {1, E}, 100, 0));
    EXPECT_EQ(rate_expansion_large_L(TM::RelFirst, {1, E}, 100, 1), rate_expansion_large_L(TM::RelFirst, {1, E}, 100, 0));
    // the two second-order terms differ by 3/y^2
    const double L = 100 / Me;
    const double d = rate_expansion_large_L(TM::RelFirst, {1, E}, L) - rate_expansion_large_L(TM::RelSecondCorrected, {1, E}, L);
    EXPECT_NEAR(d / rate_expansion_large_L(TM::RelFirst, {1, E}, L, 0), 3e-4, 1e-15);
}

TEST(Rates, HydrogenScaleFractionalDifference) {
    const double y = 2.5175e5, E = 1e-5, L = y / (1 + E);
    const double a = rate_analytic_vacuum(TM::RelFirst, {1, E}, {L, 0}).rate;
    const double b = rate_analytic_vacuum(TM::RelSecondCorrected, {1, E}, {L, 0}).rate;
    const double f = fractional_difference(a, b);
    EXPECT_NEAR(f / (3 / (y * y)), 1.0, 1e-4);
    EXPECT_EQ(std::floor(std::log10(f)), -11);
    // quadrature resolves it too
    const double qa = quad_rate(TM::RelFirst, E, 1, L, 0, 1e-12), qb = quad_rate(TM::RelSecondCorrected, E, 1, L, 0, 1e-12);
    EXPECT_NEAR(fractional_difference(qa, qb) / f, 1.0, 0.05);
}

TEST(Rates, SmallMassLimitValues) {
    EXPECT_DOUBLE_EQ(rate_limit_small_mass(TM::RelFirst, 0.001, Medium{1}), 0.001 / 4 / (2 * pi));
    EXPECT_DOUBLE_EQ(rate_limit_small_mass(TM::RelFirst, 0.002, Medium{0.5}), 0.002 * 0.5 / 2.25 / (2 * pi));
    EXPECT_EQ(rate_limit_small_mass(TM::SemiRel, 0.3, Medium{0.4}), 0.0);
    EXPECT_EQ(rate_limit_small_mass(TM::NonRel, 0.3, Medium{1}), 0.0);
    EXPECT_DOUBLE_EQ(rate_limit_small_mass(TM::RelSecondCorrected, 0.001, Medium{1}), 0.001 / 4 / (2 * pi));
    EXPECT_THROW(rate_limit_small_mass(TM::Classical, 0.3, Medium{1}), PreconditionError);
}

TEST(Rates, SmallMassConvergence) {
    // m = 10^-k at fixed E and L/lambda_c = 10
    const double E = 0.01;
    for (double nu : {1.0, 0.5})
        for (auto m : {TM::RelFirst, TM::RelSecondCorrected, TM::SemiRel, TM::NonRel}) {
            const double lim = rate_limit_small_mass(m, E, Medium{nu});
            double prev = INFINITY;
            for (int k = 1; k <= 4; ++k) {
                const double mass = std::pow(10.0, -k);
                const double dev = std::fabs(quad_rate(m, E, nu, 10 / mass, 0, 1e-9, mass) - lim);
                EXPECT_LT(dev, prev) << to_string(m) << " nu=" << nu << " k=" << k;
                prev = dev;
            }
            const double scale = E / (2 * pi);
            EXPECT_LE(prev, 0.02 * scale) << to_string(m) << " nu=" << nu;
        }
}

TEST(Rates, LargeWidthApproachesRestTemplate) {
    for (auto m : {TM::RelFirst, TM::RelSecondCorrected, TM::SemiRel, TM::NonRel}) {
        const double t0 = template_function(m, {1, 0.1}, Medium{0.7}, 0.0) / (2 * pi);
        const double d1 = rel(quad_rate(m, 0.1, 0.7, 100), t0), d2 = rel(quad_rate(m, 0.1, 0.7, 1000), t0);
        EXPECT_LE(d2, 1e-4) << to_string(m);
        EXPECT_NEAR(d1 / d2, 100, 5) << to_string(m);
    }
}

TEST(Rates, WidthScalingOppositeMonotonicity) {
    const double Ls[] = {0.1, 0.3, 1, 3, 10};
    for (double E : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
        double pf = INFINITY, ps = 0;
        for (double L : Ls) {
            const double f = quad_rate(TM::RelFirst, E, 1, L), s = quad_rate(TM::RelSecondCorrected, E, 1, L);
            EXPECT_LE(f, pf) << "E=" << E << " L=" << L;
            EXPECT_GE(s, ps) << "E=" << E << " L=" << L;
            pf = f;
            ps = s;
        }
    }
}

TEST(Rates, SmallGapSpreadShrinksWithWidth) {
    // the five rates differ through <p^2> = 3/L^2: ~4.5% at L = 10, < 1% at L = 30
    auto spread = [](double E, double L) {
        double lo = INFINITY, hi = 0;
        for (auto m : figure_models) {
            const double r = quad_rate(m, E, 1, L);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        return (hi - lo) / hi;
    };
    const double s10 = spread(1e-3, 10), s30 = spread(1e-3, 30);
    EXPECT_NEAR(s10, 0.0445, 1e-3);
    EXPECT_LT(s30, 0.01);
    EXPECT_NEAR(s10 / s30, 9, 0.2);
    EXPECT_NEAR(spread(1e-4, 10), s10, 2e-3);
}

TEST(Rates, MediumAgainstVacuumCrossover) {
    // nu = 0.1 lies above vacuum for small gaps and below for large ones
    for (auto m : relativistic)
        for (double L : {0.1, 10.0}) {
            EXPECT_GT(quad_rate(m, 1e-3, 0.1, L), quad_rate(m, 1e-3, 1, L)) << to_string(m) << " L=" << L;
            EXPECT_LT(quad_rate(m, 10.0, 0.1, L), quad_rate(m, 10.0, 1, L)) << to_string(m) << " L=" << L;
        }
}

TEST(Rates, ResultEchoesInputs) {
    auto r = rate_quadrature(TM::SemiRel, {2, 0.1}, Medium{0.3}, GaussianState{4, 0.5});
    EXPECT_EQ(r.model, TM::SemiRel);
    EXPECT_EQ(r.params.rest_mass, 2);
    EXPECT_EQ(r.medium.nu, 0.3);
    EXPECT_EQ(r.width_L, 4);
    EXPECT_EQ(r.mean_momentum, 0.5);
    EXPECT_GT(r.evaluations, 0);
    EXPECT_GE(r.rate, 0);
    EXPECT_GE(r.abs_error_estimate, 0);
}

TEST(Rates, FractionalDifference) {
    EXPECT_EQ(fractional_difference(1, 1), 0);
    EXPECT_DOUBLE_EQ(fractional_difference(1, 3), 1);
}
