#include "loclace/numeric.hpp"

#include "loclace/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace loclace::numeric {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Series sum_{k>=0} c_k d^k for the small-|d| branch of the segment integrals.
// coef(k) supplies c_k; 14 terms keep the truncation error below 1e-19 for |d| < 0.1.
template <class Coef>
double small_series(double d, Coef coef) {
    double sum = 0.0;
    double dk = 1.0;
    for (int k = 0; k < 14; ++k) {
        sum += coef(k) * dk;
        dk *= d;
    }
    return sum;
}

double inv_factorial(int k) {
    static const auto table = [] {
        std::array<double, 20> t{};
        t[0] = 1.0;
        for (int i = 1; i < 20; ++i) t[i] = t[i - 1] / i;
        return t;
    }();
    return table[static_cast<std::size_t>(k)];
}

constexpr double kSeriesCut = 0.1;

}  // namespace

double norm_pdf(double x) noexcept { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_norm_cdf(double x) noexcept {
    if (x > 5.0) return std::log1p(-norm_sf(x));
    if (x > -30.0) return std::log(norm_cdf(x));
    // Asymptotic expansion of the Mills ratio.
    const double z2 = 1.0 / (x * x);
    const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2 * (1.0 - 9.0 * z2))));
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double log_norm_cdf_diff(double a, double b) noexcept {
    if (!(a < b)) return -kInf;
    if (a >= 0.0) return log_norm_cdf_diff(-b, -a);
    if (b <= 0.0) {
        const double lb = log_norm_cdf(b);
        const double la = log_norm_cdf(a);
        if (la == -kInf) return lb;
        return lb + std::log(-std::expm1(la - lb));
    }
    return std::log(1.0 - norm_sf(b) - norm_cdf(a));
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorKind::QuantileOutOfRange, "normal quantile needs p in (0,1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double log_add_exp(double a, double b) noexcept {
    const double hi = std::max(a, b);
    if (hi == -kInf) return -kInf;
    return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double seg_j00(double r, double s) noexcept {
    const double d = s - r;
    if (d == 0.0) return std::exp(r);
    if (d > 0.0) return std::exp(s) * (-std::expm1(-d)) / d;
    return std::exp(r) * std::expm1(d) / d;
}

double seg_j10(double r, double s) noexcept {
    const double d = s - r;
    if (std::abs(d) < kSeriesCut) {
        return std::exp(r) * small_series(d, [](int k) { return inv_factorial(k + 2); });
    }
    if (d > 0.0) {
        // e^s (1 - e^{-d} (1 + d)) / d^2
        return std::exp(s) * (1.0 - std::exp(-d) * (1.0 + d)) / (d * d);
    }
    return std::exp(r) * (std::expm1(d) - d) / (d * d);
}

double seg_j01(double r, double s) noexcept { return seg_j10(s, r); }

double seg_j20(double r, double s) noexcept {
    const double d = s - r;
    if (std::abs(d) < kSeriesCut) {
        return std::exp(r) * small_series(d, [](int k) { return 2.0 * inv_factorial(k + 3); });
    }
    if (d > 0.0) {
        const double em = std::exp(-d);
        return std::exp(s) * 2.0 * (1.0 - em * (1.0 + d + 0.5 * d * d)) / (d * d * d);
    }
    return std::exp(r) * 2.0 * (std::expm1(d) - d - 0.5 * d * d) / (d * d * d);
}

double seg_j02(double r, double s) noexcept { return seg_j20(s, r); }

double seg_j11(double r, double s) noexcept {
    const double d = s - r;
    if (std::abs(d) < kSeriesCut) {
        return std::exp(r) * small_series(d, [](int k) { return (k + 1) * inv_factorial(k + 3); });
    }
    return seg_j10(r, s) - seg_j20(r, s);
}

double integrate_unchecked(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadConfig& cfg,
                           double* error_estimate) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double x : breakpoints) {
        if (x > a && x < b && std::isfinite(x)) cuts.push_back(x);
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(b);

    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    // Tolerances are global: a piece carrying little mass gets a looser
    // relative target, so rounding noise in negligible tails cannot force
    // refinement down to max_depth.
    const std::size_t pieces = cuts.size() - 1;
    std::vector<double> rough(pieces, 0.0);
    double rough_total = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        double l1 = 0.0;
        rough[i] = GK::integrate(f, cuts[i], cuts[i + 1], 0, 0.0, nullptr, &l1);
        rough_total += l1;
    }
    const double target = std::max(cfg.abs_tolerance, cfg.rel_tolerance * rough_total) / static_cast<double>(pieces);

    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        const double scale = std::abs(rough[i]);
        const double rel = scale > 0.0 ? std::clamp(target / scale, cfg.rel_tolerance, 0.1) : 0.1;
        double err = 0.0;
        total += GK::integrate(f, cuts[i], cuts[i + 1], cfg.max_depth, rel, &err);
        total_err += err;
    }
    if (error_estimate != nullptr) *error_estimate = total_err;
    return total;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const QuadConfig& cfg) {
    double err = 0.0;
    const double value = integrate_unchecked(f, a, b, breakpoints, cfg, &err);
    if (!std::isfinite(value) || err > std::max(cfg.abs_tolerance, cfg.rel_tolerance * std::abs(value)) * 10.0) {
        throw Error(ErrorKind::QuadratureFailure,
                    "adaptive refinement did not converge (value " + std::to_string(value) +
                        ", error estimate " + std::to_string(err) + ")");
    }
    return value;
}

double solve_monotone(const std::function<double(double)>& f, double lo, double hi,
                      double x_tolerance) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "root is not bracketed");
    }
    std::uintmax_t max_iter = 200;
    auto tol = [x_tolerance](double a, double b) { return std::abs(b - a) <= x_tolerance; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (a + b);
}

}  // namespace loclace::numeric
