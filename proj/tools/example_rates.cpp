// Minimal library use: templates at one momentum and the vacuum rates of a
// Gaussian packet, quadrature next to the closed forms.

#include <cstdio>

#include "udw/udw.hpp"

int main() {
    using namespace udw;
    const DetectorParams det{1.0, 1e-3}; // m = 1, E/m = 0.001
    const GaussianState packet{10.0, 0.0}; // L = 10 lambda_c, p_D = 0

    std::printf("T(p/m = 0.5), vacuum\n");
    for (auto m : figure_models)
        std::printf("  %-20s %.10e\n", std::string(to_string(m)).c_str(), template_function(m, det, Medium::vacuum(), 0.5));

    std::printf("rates per lambda^2 (units of m)\n");
    for (auto m : {TemplateModel::RelFirst, TemplateModel::RelSecondCorrected}) {
        const auto q = rate_quadrature(m, det, Medium::vacuum(), packet, 1e-10);
        const auto a = rate_analytic_vacuum(m, det, packet);
        std::printf("  %-20s quadrature %.12e  closed form %.12e\n", std::string(to_string(m)).c_str(), q.rate, a.rate);
    }
    const auto c = rate_quadrature(TemplateModel::Classical, det, Medium{0.5}, packet);
    std::printf("  classical, nu = 0.5  %.12e (E/nu/2pi = %.12e)\n", c.rate, 1e-3 / 0.5 / (2 * pi));
}
