#pragma once

// Symmetric density and score estimators centred at a preliminary location:
// the partial MLE (symmetric log-concave MLE of the centred data), the
// geometric-mean symmetrisation of the log-concave MLE, and the smoothed
// symmetrised estimator built from the Gaussian-smoothed log-concave MLE.

#include "loclace/lcmle.hpp"

#include <cmath>
#include <span>
#include <string_view>
#include <variant>

namespace loclace {

enum class ScoreKind { PartialMLE, GeoSym, SymSmoothed };

std::string_view to_string(ScoreKind kind) noexcept;
ScoreKind parse_score_kind(std::string_view name);

/// Reflected sample {+-(x_i - theta)} with weight 1/(2n) each. Points whose
/// absolute centred values agree to 1e-12 relative are merged, so the output
/// is exactly mirror-symmetric.
WeightedSample reflect_sample(std::span<const double> sample, double theta);

/// Log-concave MLE among densities symmetric about theta, returned centred at
/// zero. Computed as the unconstrained weighted MLE of the reflected sample.
LogConcaveFit fit_symmetric_logconcave(std::span<const double> sample, double theta,
                                       const FitConfig& cfg = {});

/// Log-concave MLE convolved with N(0, bandwidth^2), evaluated in closed form:
/// each log-linear piece convolves to an exponentially tilted difference of
/// normal cdfs.
class SmoothedFit {
public:
    SmoothedFit(LogConcaveFit base, double bandwidth);

    const LogConcaveFit& base() const noexcept { return base_; }
    double bandwidth() const noexcept { return bandwidth_; }

    struct Eval {
        double logpdf;
        double score;  // (d/dz) log f_sm
    };
    Eval evaluate(double z) const noexcept;
    double pdf(double z) const noexcept { return std::exp(evaluate(z).logpdf); }
    double logpdf(double z) const noexcept { return evaluate(z).logpdf; }
    double derivative(double z) const noexcept;
    double cdf(double z) const;

private:
    LogConcaveFit base_;
    double bandwidth_;
};

/// Sample-variance minus fitted-variance bandwidth; throws
/// NonPositiveBandwidth when the difference is not positive.
double smoothing_bandwidth(std::span<const double> sample, const LogConcaveFit& full_fit);

SmoothedFit smoothed_mle(const LogConcaveFit& full_fit, double bandwidth);

/// The smoothed symmetrised density g(z) = (f_sm(c+z) + f_sm(c-z)) / 2.
class SymmetrizedSmooth {
public:
    SymmetrizedSmooth(SmoothedFit smooth, double center) : smooth_(std::move(smooth)), center_(center) {}

    const SmoothedFit& smooth() const noexcept { return smooth_; }
    double center() const noexcept { return center_; }

    struct Eval {
        double logpdf;
        double score;
        double mix_weight;  // f_sm(c+z) / (2 g(z))
    };
    Eval evaluate(double z) const noexcept;
    /// Distribution function of g; cdf(z) + cdf(-z) = 1 up to rounding.
    double cdf(double z) const;

private:
    SmoothedFit smooth_;
    double center_;
};

/// An even density estimate g centred at zero together with its log-density
/// and right-derivative score.
class ScoreEstimate {
public:
    ScoreEstimate(ScoreKind kind, double center, LogConcaveFit fit);
    ScoreEstimate(double center, SymmetrizedSmooth smooth);

    ScoreKind kind() const noexcept { return kind_; }
    double center() const noexcept { return center_; }
    bool log_concave() const noexcept { return kind_ != ScoreKind::SymSmoothed; }

    double pdf(double z) const noexcept;
    double logpdf(double z) const noexcept;
    double score(double z) const noexcept;
    double cdf(double z) const;
    /// Symmetric by construction: quantile(q) = -quantile(1-q) exactly.
    double quantile(double q) const;

    double support_lower() const noexcept;
    double support_upper() const noexcept;

    /// int_{-xi}^{xi} score(z)^2 g(z) dz; xi = +inf integrates over the support.
    double information(double xi) const;

    /// Points where the density or score is not smooth (knots, endpoints).
    std::vector<double> breakpoints() const;
    DensityView view() const;

    const LogConcaveFit* fit() const noexcept { return std::get_if<LogConcaveFit>(&impl_); }
    const SymmetrizedSmooth* smoothed() const noexcept { return std::get_if<SymmetrizedSmooth>(&impl_); }

private:
    ScoreKind kind_;
    double center_;
    std::variant<LogConcaveFit, SymmetrizedSmooth> impl_;
};

ScoreEstimate partial_mle(std::span<const double> sample, double theta_bar, const FitConfig& cfg = {});
ScoreEstimate geo_sym(std::span<const double> sample, double theta_bar, const FitConfig& cfg = {});
ScoreEstimate sym_smoothed(std::span<const double> sample, double theta_bar, const FitConfig& cfg = {});
ScoreEstimate build_score_estimate(ScoreKind kind, std::span<const double> sample, double theta_bar,
                                   const FitConfig& cfg = {});

}  // namespace loclace
