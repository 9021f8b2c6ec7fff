#pragma once

// One-step location estimators: a preliminary centre plus one Newton-type
// correction with an estimated symmetric score, optionally truncated to the
// central 1 - 2*eta mass of the score estimate.

#include "loclace/symlc.hpp"

#include <functional>
#include <span>
#include <string>

namespace loclace {

struct Preliminary {
    enum class Kind { Mean, Median, TrimmedMean };
    Kind kind = Kind::Mean;
    double fraction = 0.0;  // TrimmedMean only, in (0, 0.5)

    static Preliminary mean() { return {Kind::Mean, 0.0}; }
    static Preliminary median() { return {Kind::Median, 0.0}; }
    static Preliminary trimmed(double f) { return {Kind::TrimmedMean, f}; }
};

/// "mean", "median" or "trimmed:<fraction>".
Preliminary parse_preliminary(const std::string& text);
std::string to_string(const Preliminary& p);

enum class InfoVariant { Empirical, Smoothed };
InfoVariant parse_info_variant(std::string_view name);
std::string_view to_string(InfoVariant v) noexcept;

struct OneStepConfig {
    Preliminary preliminary = Preliminary::mean();
    double eta = 0.0;  // 0: untruncated
    InfoVariant info_variant = InfoVariant::Empirical;
    ScoreKind score_kind = ScoreKind::SymSmoothed;
    FitConfig fit{};

    void validate() const;
};

struct LocationEstimate {
    double theta = 0.0;
    double preliminary_theta = 0.0;
    double fisher_info = 0.0;
    double eta = 0.0;
    double xi = 0.0;  // may be +inf
    std::size_t n = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
};

/// Mean, lower/upper-midpoint median, or trimmed mean dropping floor(f n)
/// observations from each tail. Throws EmptySample.
double preliminary(std::span<const double> sample, const Preliminary& kind);

/// The (1-eta) quantile xi of the estimate, eta in (0, 0.5). The lower cut is
/// -xi by symmetry.
double truncation_quantile(const ScoreEstimate& estimate, double eta);

/// A score model known only through evaluation, used for plug-in scores.
struct PlugInScore {
    std::function<double(double)> score;
    std::function<double(double)> pdf;  // needed by the Smoothed variant only
    double lower = -kInf;
    double upper = kInf;
};

/// Truncated Fisher information on the window |x - theta_bar| <= xi.
/// Empirical: (1/n) sum of squared scores over observations in the window.
/// Smoothed: int_{-xi}^{xi} score^2 g. Throws ZeroInformation on a zero result.
double fisher_info_estimate(std::span<const double> sample, double theta_bar, const ScoreEstimate& estimate,
                            double eta, InfoVariant variant);
double fisher_info_estimate(std::span<const double> sample, double theta_bar, const PlugInScore& model,
                            double xi, InfoVariant variant);

/// Wald interval theta -+ z_{(1+level)/2} / sqrt(n info).
std::pair<double, double> confidence_interval(double theta, double info, std::size_t n, double level);

LocationEstimate onestep_estimate(std::span<const double> sample, const OneStepConfig& cfg, double level = 0.95);

/// One-step update with an arbitrary score model at a given centre and window.
LocationEstimate onestep_with_score(std::span<const double> sample, double theta_bar, const PlugInScore& model,
                                    double xi, InfoVariant variant, double level = 0.95);

/// Rate-based truncation level eta = c * n^(-2p/5), with p = 1/4 (partial
/// MLE), 2/5 (geometric symmetrisation) or 1/5 (smoothed symmetrisation).
double eta_for_sample_size(ScoreKind kind, std::size_t n, double c = 1.0);

}  // namespace loclace
