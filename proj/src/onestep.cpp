#include "loclace/onestep.hpp"

#include "loclace/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

namespace loclace {

namespace {

double parse_fraction(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::InvalidArgument, "cannot parse trimming fraction '" + std::string(text) + "'");
    }
    return value;
}

double sorted_median(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double window_score_sum(std::span<const double> sample, double theta_bar, double xi,
                        const std::function<double(double)>& score, double* sum_squares) {
    double sum = 0.0;
    double sq = 0.0;
    for (double x : sample) {
        const double z = x - theta_bar;
        if (std::abs(z) <= xi) {
            const double s = score(z);
            sum += s;
            sq += s * s;
        }
    }
    if (sum_squares != nullptr) *sum_squares = sq;
    return sum;
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "confidence level must lie in (0,1)");
}

LocationEstimate assemble(double theta_bar, double score_sum, double info, double eta, double xi, std::size_t n,
                          double level) {
    if (!(info > 0.0) || !std::isfinite(info)) {
        throw Error(ErrorKind::ZeroInformation, "estimated Fisher information is zero");
    }
    LocationEstimate est;
    est.preliminary_theta = theta_bar;
    est.theta = theta_bar - score_sum / (static_cast<double>(n) * info);
    est.fisher_info = info;
    est.eta = eta;
    est.xi = xi;
    est.n = n;
    est.level = level;
    std::tie(est.ci_low, est.ci_high) = confidence_interval(est.theta, info, n, level);
    return est;
}

}  // namespace

Preliminary parse_preliminary(const std::string& text) {
    if (text == "mean") return Preliminary::mean();
    if (text == "median") return Preliminary::median();
    constexpr std::string_view prefix = "trimmed:";
    if (text.rfind(prefix, 0) == 0) {
        const double f = parse_fraction(std::string_view(text).substr(prefix.size()));
        if (!(f > 0.0 && f < 0.5)) throw Error(ErrorKind::InvalidArgument, "trimming fraction must lie in (0, 0.5)");
        return Preliminary::trimmed(f);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown preliminary estimator '" + text + "'");
}

std::string to_string(const Preliminary& p) {
    switch (p.kind) {
        case Preliminary::Kind::Mean: return "mean";
        case Preliminary::Kind::Median: return "median";
        case Preliminary::Kind::TrimmedMean: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "trimmed:%.17g", p.fraction);
            return buf;
        }
    }
    return "unknown";
}

InfoVariant parse_info_variant(std::string_view name) {
    if (name == "empirical") return InfoVariant::Empirical;
    if (name == "smoothed") return InfoVariant::Smoothed;
    throw Error(ErrorKind::InvalidArgument, "unknown information variant '" + std::string(name) + "'");
}

std::string_view to_string(InfoVariant v) noexcept {
    return v == InfoVariant::Empirical ? "empirical" : "smoothed";
}

void OneStepConfig::validate() const {
    if (!(eta >= 0.0 && eta < 0.5)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0, 0.5)");
    if (preliminary.kind == Preliminary::Kind::TrimmedMean && !(preliminary.fraction > 0.0 && preliminary.fraction < 0.5)) {
        throw Error(ErrorKind::InvalidArgument, "trimming fraction must lie in (0, 0.5)");
    }
}

double preliminary(std::span<const double> sample, const Preliminary& kind) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "preliminary estimate of an empty sample");
    const double n = static_cast<double>(sample.size());
    switch (kind.kind) {
        case Preliminary::Kind::Mean:
            return std::accumulate(sample.begin(), sample.end(), 0.0) / n;
        case Preliminary::Kind::Median: {
            std::vector<double> v(sample.begin(), sample.end());
            return sorted_median(v);
        }
        case Preliminary::Kind::TrimmedMean: {
            if (!(kind.fraction > 0.0 && kind.fraction < 0.5)) {
                throw Error(ErrorKind::InvalidArgument, "trimming fraction must lie in (0, 0.5)");
            }
            std::vector<double> v(sample.begin(), sample.end());
            std::sort(v.begin(), v.end());
            const auto cut = static_cast<std::size_t>(std::floor(kind.fraction * n));
            const double kept = static_cast<double>(v.size() - 2 * cut);
            return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(cut),
                                   v.end() - static_cast<std::ptrdiff_t>(cut), 0.0) / kept;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown preliminary estimator");
}

double truncation_quantile(const ScoreEstimate& estimate, double eta) {
    if (!(eta > 0.0 && eta < 0.5)) throw Error(ErrorKind::QuantileOutOfRange, "eta must lie in (0, 0.5)");
    return estimate.quantile(1.0 - eta);
}

double fisher_info_estimate(std::span<const double> sample, double theta_bar, const ScoreEstimate& estimate,
                            double eta, InfoVariant variant) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations");
    const double xi = eta == 0.0 ? estimate.support_upper() : truncation_quantile(estimate, eta);
    double info = 0.0;
    if (variant == InfoVariant::Empirical) {
        double sq = 0.0;
        window_score_sum(sample, theta_bar, xi, [&estimate](double z) { return estimate.score(z); }, &sq);
        info = sq / static_cast<double>(sample.size());
    } else {
        info = estimate.information(xi);
    }
    if (!(info > 0.0)) throw Error(ErrorKind::ZeroInformation, "all estimated scores vanish in the window");
    return info;
}

double fisher_info_estimate(std::span<const double> sample, double theta_bar, const PlugInScore& model, double xi,
                            InfoVariant variant) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations");
    double info = 0.0;
    if (variant == InfoVariant::Empirical) {
        double sq = 0.0;
        window_score_sum(sample, theta_bar, xi, model.score, &sq);
        info = sq / static_cast<double>(sample.size());
    } else {
        if (!model.pdf) throw Error(ErrorKind::InvalidArgument, "the smoothed variant needs a density");
        const double lo = std::max(-xi, model.lower);
        const double hi = std::min(xi, model.upper);
        if (hi > lo) {
            auto integrand = [&model](double z) {
                const double s = model.score(z);
                return s * s * model.pdf(z);
            };
            const double mid[] = {0.0};
            info = numeric::integrate(integrand, lo, hi, mid);
        }
    }
    if (!(info > 0.0)) throw Error(ErrorKind::ZeroInformation, "all scores vanish in the window");
    return info;
}

std::pair<double, double> confidence_interval(double theta, double info, std::size_t n, double level) {
    check_level(level);
    if (!(info > 0.0)) throw Error(ErrorKind::ZeroInformation, "interval needs positive information");
    if (n == 0) throw Error(ErrorKind::EmptySample, "interval needs n >= 1");
    const double z = numeric::norm_quantile(0.5 * (1.0 + level));
    const double half = z / std::sqrt(static_cast<double>(n) * info);
    return {theta - half, theta + half};
}

LocationEstimate onestep_estimate(std::span<const double> sample, const OneStepConfig& cfg, double level) {
    cfg.validate();
    check_level(level);
    if (sample.size() < 2) throw Error(ErrorKind::DegenerateSample, "one-step estimation needs n >= 2");
    const double theta_bar = preliminary(sample, cfg.preliminary);
    const ScoreEstimate estimate = build_score_estimate(cfg.score_kind, sample, theta_bar, cfg.fit);
    const double xi = cfg.eta == 0.0 ? estimate.support_upper() : truncation_quantile(estimate, cfg.eta);

    double sq = 0.0;
    const double sum = window_score_sum(sample, theta_bar, xi, [&estimate](double z) { return estimate.score(z); }, &sq);
    const double info = cfg.info_variant == InfoVariant::Empirical ? sq / static_cast<double>(sample.size())
                                                                   : estimate.information(xi);
    return assemble(theta_bar, sum, info, cfg.eta, xi, sample.size(), level);
}

LocationEstimate onestep_with_score(std::span<const double> sample, double theta_bar, const PlugInScore& model,
                                    double xi, InfoVariant variant, double level) {
    check_level(level);
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations");
    const double info = fisher_info_estimate(sample, theta_bar, model, xi, variant);
    const double sum = window_score_sum(sample, theta_bar, xi, model.score, nullptr);
    return assemble(theta_bar, sum, info, 0.0, xi, sample.size(), level);
}

double eta_for_sample_size(ScoreKind kind, std::size_t n, double c) {
    if (n == 0) throw Error(ErrorKind::EmptySample, "sample size must be positive");
    if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "rate constant must be positive");
    double p = 0.0;
    switch (kind) {
        case ScoreKind::PartialMLE: p = 0.25; break;
        case ScoreKind::GeoSym: p = 0.4; break;
        case ScoreKind::SymSmoothed: p = 0.2; break;
    }
    const double eta = c * std::pow(static_cast<double>(n), -2.0 * p / 5.0);
    if (!(eta < 0.5)) throw Error(ErrorKind::InvalidArgument, "rate constant gives eta >= 0.5");
    return eta;
}

}  // namespace loclace
