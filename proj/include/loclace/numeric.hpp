#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace loclace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace numeric {

double norm_pdf(double x) noexcept;
double norm_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate for large x.
double norm_sf(double x) noexcept;
/// log Phi(x), accurate deep into the lower tail.
double log_norm_cdf(double x) noexcept;
/// log(Phi(b) - Phi(a)) for a < b; -inf when the difference underflows to zero.
double log_norm_cdf_diff(double a, double b) noexcept;
/// Standard normal quantile (Boost.Math, full double precision).
double norm_quantile(double p);

/// log(exp(a) + exp(b)), symmetric in its arguments.
double log_add_exp(double a, double b) noexcept;

/// Closed-form integrals of exp over a log-linear piece, parameterised by the
/// endpoint log-values (r, s) on the unit interval:
///   J(r,s)   = int_0^1 exp((1-t) r + t s) dt
///   J10      = int (1-t) exp(..),  J01 = int t exp(..)
///   J20      = int (1-t)^2 exp(..), J02 = int t^2 exp(..), J11 = int t(1-t) exp(..)
double seg_j00(double r, double s) noexcept;
double seg_j10(double r, double s) noexcept;
double seg_j01(double r, double s) noexcept;
double seg_j20(double r, double s) noexcept;
double seg_j02(double r, double s) noexcept;
double seg_j11(double r, double s) noexcept;

struct QuadConfig {
    double abs_tolerance = 1e-13;
    double rel_tolerance = 1e-11;
    unsigned max_depth = 18;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b], split at the given
/// breakpoints (those outside (a, b) are ignored). Throws QuadratureFailure
/// when the combined error estimate exceeds the requested tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {}, const QuadConfig& cfg = {});

/// Same, but returns the error estimate instead of throwing.
double integrate_unchecked(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadConfig& cfg,
                           double* error_estimate);

/// Bracketing root finder (Brent / TOMS 748 via Boost) for monotone targets.
double solve_monotone(const std::function<double(double)>& f, double lo, double hi,
                      double x_tolerance);

}  // namespace numeric
}  // namespace loclace
