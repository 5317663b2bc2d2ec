#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace udw::quad {

template <class Real = double>
struct Result {
    Real value = 0;
    Real abs_error = 0;
    long evaluations = 0;
    bool converged = false;
};

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    long max_evals = 1'000'000;
};

namespace detail {

// Gauss-Kronrod 10/21 nodes and weights, listed from the centre outwards.
inline constexpr long double xgk[11] = {
    0.0L,
    0.14887433898163121088482600112971998L,
    0.29439286270146019813112660310386557L,
    0.43339539412924719079926594316578416L,
    0.56275713466860468333900009927269414L,
    0.67940956829902440623432736511487358L,
    0.78081772658641689706371757834504238L,
    0.86506336668898451073209668842349305L,
    0.93015749135570822600120718005950835L,
    0.97390652851717172007796401208445205L,
    0.99565716302580808073552728068900285L};

inline constexpr long double wgk[11] = {
    0.14944555400291690566493646838982120L,
    0.14773910490133849137484151597206805L,
    0.14277593857706008079709427313871706L,
    0.13470921731147332592805400177170683L,
    0.12349197626206585107795810983107416L,
    0.10938715880229764189921059032580496L,
    0.093125454583697605535065465083366344L,
    0.075039674810919952767043140916190009L,
    0.054755896574351996031381300244580176L,
    0.032558162307964727478818972459389761L,
    0.011694638867371874278064396062192048L};

// Gauss weights for the odd Kronrod nodes 1,3,...,9.
inline constexpr long double wg[5] = {
    0.295524224714752870173892994651L,
    0.269266719309996355091226921569L,
    0.219086362515982043995534934228L,
    0.149451349150580593145776339658L,
    0.0666713443086881375935688098933L};

template <class Real>
struct Segment {
    Real a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class Real, class F>
Segment<Real> gk21(F& f, Real a, Real b) {
    const Real c = (a + b) / 2, h = (b - a) / 2;
    const Real fc = f(c);
    Real rk = fc * Real(wgk[0]);
    Real rg = 0;
    Real fv1[10], fv2[10];
    for (int j = 1; j <= 10; ++j) {
        const Real dx = h * Real(xgk[j]);
        const Real f1 = f(c - dx), f2 = f(c + dx);
        fv1[j - 1] = f1;
        fv2[j - 1] = f2;
        rk += Real(wgk[j]) * (f1 + f2);
        if (j % 2 == 1) rg += Real(wg[j / 2]) * (f1 + f2);
    }
    const Real mean = rk / 2;
    Real asc = Real(wgk[0]) * std::abs(fc - mean);
    Real abs_k = Real(wgk[0]) * std::abs(fc);
    for (int j = 1; j <= 10; ++j) {
        asc += Real(wgk[j]) * (std::abs(fv1[j - 1] - mean) + std::abs(fv2[j - 1] - mean));
        abs_k += Real(wgk[j]) * (std::abs(fv1[j - 1]) + std::abs(fv2[j - 1]));
    }
    const Real ah = std::abs(h);
    asc *= ah;
    abs_k *= ah;
    const Real value = rk * h;
    Real err = std::abs((rk - rg) * h);
    if (asc != 0 && err != 0) err = asc * std::min(Real(1), std::pow(200 * err / asc, Real(1.5)));
    const Real eps = std::numeric_limits<Real>::epsilon();
    if (abs_k > std::numeric_limits<Real>::min() / (50 * eps)) err = std::max(50 * eps * abs_k, err);
    return {a, b, value, err};
}

} // namespace detail

// Globally adaptive 21-point Gauss-Kronrod on [a,b], split first at the
// given interior breakpoints. Never throws; check converged.
template <class Real = double, class F>
Result<Real> integrate(F&& f, Real a, Real b, const Options& opt = {}, const std::vector<Real>& breaks = {}) {
    Result<Real> res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    Real sign = 1;
    if (b < a) {
        std::swap(a, b);
        sign = -1;
    }
    std::vector<Real> pts{a};
    for (Real x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::priority_queue<detail::Segment<Real>> heap;
    std::vector<detail::Segment<Real>> frozen; // too narrow to split further
    Real total = 0, err = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto s = detail::gk21(f, pts[i], pts[i + 1]);
        res.evaluations += 21;
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    const Real eps = std::numeric_limits<Real>::epsilon();
    auto target = [&] { return std::max(Real(opt.abs_tol), Real(opt.rel_tol) * std::abs(total)); };
    while (err > target() && !heap.empty()) {
        if (res.evaluations + 42 > opt.max_evals) break;
        auto s = heap.top();
        heap.pop();
        const Real mid = (s.a + s.b) / 2;
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 100 * eps * std::max(std::abs(s.a), std::abs(s.b))) {
            frozen.push_back(s);
            continue;
        }
        auto l = detail::gk21(f, s.a, mid);
        auto r = detail::gk21(f, mid, s.b);
        res.evaluations += 42;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
    }
    // resum to shed accumulated rounding from the running updates
    total = 0;
    err = 0;
    for (auto& s : frozen) {
        total += s.value;
        err += s.error;
    }
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    res.value = sign * total;
    res.abs_error = err;
    res.converged = err <= std::max(Real(opt.abs_tol), Real(opt.rel_tol) * std::abs(total));
    return res;
}

// Double-exponential rules. Each level halves the step; the sum is stopped
// once two successive levels agree to tol.
namespace detail {

template <class Point>
Result<double> de_levels(Point&& point, double tol, int max_level) {
    // point(u) returns weight * f at the node for parameter u (0 if outside)
    Result<double> res;
    double h = 1.0;
    auto sweep = [&](double start, double step) {
        double s = 0;
        for (int dir : {1, -1}) {
            int small = 0;
            for (double u = (dir > 0 ? start : -start); std::fabs(u) < 8.0; u += dir * step) {
                if (dir < 0 && u == 0) continue;
                const double v = point(u);
                ++res.evaluations;
                s += v;
                if (std::fabs(v) <= 1e-300 || std::fabs(v) < 1e-20 * std::fabs(s)) {
                    if (++small > 3) break;
                } else {
                    small = 0;
                }
            }
        }
        return s;
    };
    double sum = sweep(0.0, h);
    double prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h /= 2;
        sum += sweep(h, 2 * h);
        const double cur = sum * h;
        res.value = cur;
        res.abs_error = std::fabs(cur - prev);
        if (level >= 3 && res.abs_error <= tol * std::fabs(cur)) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    return res;
}

} // namespace detail

// int_0^1 f(t) dt, endpoint singularities allowed.
template <class F>
Result<double> tanh_sinh01(F&& f, double tol = 1e-14, int max_level = 12) {
    const double pi = 3.14159265358979323846;
    return detail::de_levels(
        [&](double u) {
            const double s = pi * std::sinh(u);
            const double q = std::exp(-std::fabs(s));
            if (q == 0) return 0.0;
            const double t = s >= 0 ? 1 / (1 + q) : q / (1 + q);
            if (t <= 0 || t >= 1) return 0.0;
            const double w = pi * std::cosh(u) * q / ((1 + q) * (1 + q));
            return w * f(t);
        },
        tol, max_level);
}

// int_1^inf f(t) dt for f decaying at infinity.
template <class F>
Result<double> exp_sinh1(F&& f, double tol = 1e-14, int max_level = 12) {
    const double half_pi = 1.57079632679489661923;
    return detail::de_levels(
        [&](double u) {
            const double s = half_pi * std::sinh(u);
            if (s > 700) return 0.0;
            const double e = std::exp(s);
            if (e == 0) return 0.0;
            return half_pi * std::cosh(u) * e * f(1 + e);
        },
        tol, max_level);
}

// Root of a sign-changing f on [lo, hi], bisected down to adjacent doubles
// or until hi - lo <= xtol.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 0.0) {
    double flo = f(lo);
    if (flo == 0) return lo;
    for (int it = 0; it < 2000; ++it) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
        const double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2;
}

// Maximizer of a unimodal f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 200) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(hi)); ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

// Wynn epsilon acceleration of a sequence of partial sums.
template <class Real = double>
class WynnEpsilon {
public:
    // Returns the current accelerated estimate.
    Real add(Real s) {
        sums_.push_back(s);
        prev_ = est_;
        est_ = extrapolate();
        return est_;
    }
    Real estimate() const { return est_; }
    Real change() const { return sums_.size() < 3 ? std::numeric_limits<Real>::infinity() : std::abs(est_ - prev_); }
    std::size_t size() const { return sums_.size(); }

private:
    Real extrapolate() const {
        const std::size_t n = sums_.size();
        // use at most the last 50 sums; older ones carry no information
        const std::size_t start = n > 50 ? n - 50 : 0;
        std::vector<Real> e0(n - start, 0), e1(sums_.begin() + start, sums_.end());
        Real best = e1.back();
        for (std::size_t col = 1; e1.size() > 1; ++col) {
            std::vector<Real> e2(e1.size() - 1);
            bool ok = true;
            for (std::size_t i = 0; i + 1 < e1.size(); ++i) {
                const Real d = e1[i + 1] - e1[i];
                if (d == 0) {
                    ok = false;
                    break;
                }
                e2[i] = e0[i + 1] + 1 / d;
            }
            if (!ok) break;
            if (col % 2 == 0) best = e2.back();
            e0 = std::move(e1);
            e1 = std::move(e2);
        }
        return best;
    }
    std::vector<Real> sums_;
    Real est_ = 0, prev_ = 0;
};

} // namespace udw::quad
