#pragma once

// Weighted log-concave maximum likelihood on the real line.
//
// The estimator maximises
//     sum_i w_i psi(x_i) - int exp(psi(x)) dx
// over concave psi. The maximiser is piecewise linear with knots among the
// observation points, equals -inf outside [x_min, x_max], and integrates to
// one automatically (the Lagrange form absorbs the normalising constant).

#include "loclace/numeric.hpp"

#include <functional>
#include <span>
#include <vector>

namespace loclace {

/// Distinct support points in ascending order with positive weights summing to one.
struct WeightedSample {
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }
};

/// Sorts, merges tied points (summing their weights) and normalises.
/// Throws InvalidArgument on non-finite points or non-positive weights.
WeightedSample make_weighted_sample(std::span<const double> points, std::span<const double> weights);

/// Empirical measure of the observations: weight 1/n each, ties merged.
WeightedSample empirical_sample(std::span<const double> observations);

struct FitConfig {
    int max_iterations = 5000;
    double criterion_tolerance = 1e-9;
    double slope_tolerance = 1e-9;
};

struct Evaluation {
    double pdf;
    double logpdf;  // -inf outside the support
    double score;   // right derivative of logpdf; 0 outside the support
};

struct Moments {
    double mean;
    double variance;
};

/// A piecewise-linear concave log-density: linear between consecutive knots,
/// -inf outside [knots.front(), knots.back()]. Immutable once built.
class LogConcaveFit {
public:
    /// Validates ordering and concavity (slope tolerance 1e-9).
    LogConcaveFit(std::vector<double> knots, std::vector<double> logvals);
    LogConcaveFit(std::vector<double> knots, std::vector<double> logvals, double criterion_value);

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& logvals() const noexcept { return logvals_; }
    const std::vector<double>& slopes() const noexcept { return slopes_; }
    double criterion_value() const noexcept { return criterion_value_; }
    /// int exp(psi) - 1, as computed from the closed-form segment integrals.
    double normalization_residual() const noexcept { return total_mass_ - 1.0; }
    double total_mass() const noexcept { return total_mass_; }
    double lower() const noexcept { return knots_.front(); }
    double upper() const noexcept { return knots_.back(); }

    /// At the upper endpoint, where no segment lies to the right, the score is
    /// the slope of the last segment. This keeps the score odd at the support
    /// endpoints of symmetric fits.
    Evaluation evaluate(double x) const noexcept;
    double pdf(double x) const noexcept { return evaluate(x).pdf; }
    double logpdf(double x) const noexcept { return evaluate(x).logpdf; }
    double score(double x) const noexcept { return evaluate(x).score; }

    /// Distribution function of the normalised density.
    double cdf(double x) const noexcept;
    /// Exact inverse of cdf on the support; q must lie in (0,1).
    double quantile(double q) const;

    Moments moments() const noexcept;

    /// sum_i w_i psi(x_i) - int exp(psi) for an arbitrary weighted sample.
    double criterion(const WeightedSample& sample) const noexcept;

private:
    void init();

    std::vector<double> knots_;
    std::vector<double> logvals_;
    std::vector<double> slopes_;
    std::vector<double> cumulative_;  // mass to the left of each knot
    double total_mass_ = 0.0;
    double criterion_value_ = 0.0;
};

/// Throws DegenerateSample when fewer than two distinct points are present and
/// NonConvergence when cfg.max_iterations is exhausted.
LogConcaveFit fit_weighted_logconcave(const WeightedSample& sample, const FitConfig& cfg = {});

/// A density known only through evaluation; breakpoints mark discontinuities
/// or kinks that the quadrature should not straddle.
struct DensityView {
    std::function<double(double)> pdf;
    double lower = -kInf;
    double upper = kInf;
    std::vector<double> breakpoints;
};

DensityView view_of(const LogConcaveFit& fit);

/// Hellinger distance with H^2 = 1/2 int (sqrt f1 - sqrt f2)^2, by adaptive
/// quadrature over the union of the two supports. Result in [0, 1].
double hellinger(const DensityView& a, const DensityView& b, const numeric::QuadConfig& quad = {});

}  // namespace loclace
