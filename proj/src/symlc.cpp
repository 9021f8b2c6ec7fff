#include "loclace/symlc.hpp"

#include "loclace/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loclace {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double sigmoid(double t) noexcept {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Sorted absolute values with clusters closer than `tol` collapsed to their
// largest member. Values at or below `tol` collapse to zero.
std::vector<double> mirrored_abscissae(std::vector<double> values, double tol) {
    for (double& v : values) v = std::abs(v);
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double v : values) {
        const double rep = v <= tol ? 0.0 : v;
        if (!out.empty() && rep - out.back() <= tol) {
            out.back() = std::max(out.back(), rep);
        } else {
            out.push_back(rep);
        }
    }
    return out;
}

// Knot vector -p_k < ... < -p_1 < (0) < p_1 < ... < p_k from non-negative abscissae.
std::vector<double> mirror(const std::vector<double>& positive) {
    std::vector<double> knots;
    knots.reserve(2 * positive.size());
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        if (*it > 0.0) knots.push_back(-*it);
    }
    for (double p : positive) knots.push_back(p);
    return knots;
}

}  // namespace

std::string_view to_string(ScoreKind kind) noexcept {
    switch (kind) {
        case ScoreKind::PartialMLE: return "partial-mle";
        case ScoreKind::GeoSym: return "geo-sym";
        case ScoreKind::SymSmoothed: return "sym-smoothed";
    }
    return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
    if (name == "partial-mle") return ScoreKind::PartialMLE;
    if (name == "geo-sym") return ScoreKind::GeoSym;
    if (name == "sym-smoothed") return ScoreKind::SymSmoothed;
    throw Error(ErrorKind::InvalidArgument, "unknown score kind '" + std::string(name) + "'");
}

WeightedSample reflect_sample(std::span<const double> sample, double theta) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations to reflect");
    std::vector<double> centred(sample.size());
    double span_max = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!std::isfinite(sample[i])) throw Error(ErrorKind::InvalidArgument, "non-finite observation");
        centred[i] = std::abs(sample[i] - theta);
        span_max = std::max(span_max, centred[i]);
    }
    const double tol = 1e-12 * span_max;
    std::sort(centred.begin(), centred.end());

    // Cluster sorted |x_i - theta|, remembering how many observations fall in each.
    std::vector<double> reps;
    std::vector<double> counts;
    for (double v : centred) {
        const double rep = v <= tol ? 0.0 : v;
        if (!reps.empty() && rep - reps.back() <= tol) {
            reps.back() = std::max(reps.back(), rep);
            counts.back() += 1.0;
        } else {
            reps.push_back(rep);
            counts.push_back(1.0);
        }
    }
    const double n = static_cast<double>(sample.size());
    WeightedSample out;
    for (std::size_t k = reps.size(); k-- > 0;) {
        if (reps[k] > 0.0) {
            out.points.push_back(-reps[k]);
            out.weights.push_back(counts[k] / (2.0 * n));
        }
    }
    for (std::size_t k = 0; k < reps.size(); ++k) {
        out.points.push_back(reps[k]);
        out.weights.push_back(reps[k] > 0.0 ? counts[k] / (2.0 * n) : counts[k] / n);
    }
    return out;
}

LogConcaveFit fit_symmetric_logconcave(std::span<const double> sample, double theta, const FitConfig& cfg) {
    const WeightedSample reflected = reflect_sample(sample, theta);
    if (reflected.size() < 2) {
        throw Error(ErrorKind::DegenerateSample, "all observations coincide with the centre");
    }
    const LogConcaveFit raw = fit_weighted_logconcave(reflected, cfg);

    // The maximiser is even; average the solver output with its mirror image
    // so the returned fit is symmetric to the last bit.
    const std::vector<double> positive = mirrored_abscissae(raw.knots(), 0.0);
    std::vector<double> knots = mirror(positive);
    std::vector<double> logvals(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const double z = std::abs(knots[i]);
        logvals[i] = 0.5 * (raw.logpdf(z) + raw.logpdf(-z));
    }
    LogConcaveFit provisional(std::move(knots), std::move(logvals));
    const double crit = provisional.criterion(reflected);
    return LogConcaveFit(provisional.knots(), provisional.logvals(), crit);
}

// ---------------------------------------------------------------------------
// SmoothedFit

SmoothedFit::SmoothedFit(LogConcaveFit base, double bandwidth) : base_(std::move(base)), bandwidth_(bandwidth) {
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
        throw Error(ErrorKind::NonPositiveBandwidth, "smoothing bandwidth must be positive and finite");
    }
}

SmoothedFit::Eval SmoothedFit::evaluate(double z) const noexcept {
    const auto& k = base_.knots();
    const auto& v = base_.logvals();
    const auto& beta = base_.slopes();
    const double lam = bandwidth_;
    const double lam2 = lam * lam;
    const std::size_t segs = beta.size();

    // Piece s contributes exp(v_a + b (z - a) + b^2 lam^2 / 2) * (Phi(u_b) - Phi(u_a)).
    thread_local std::vector<double> logs;
    logs.resize(segs + 2);
    double top = -kInf;
    for (std::size_t s = 0; s < segs; ++s) {
        const double b = beta[s];
        const double shift = z + b * lam2;
        const double ua = (k[s] - shift) / lam;
        const double ub = (k[s + 1] - shift) / lam;
        logs[s] = v[s] + b * (z - k[s]) + 0.5 * b * b * lam2 + numeric::log_norm_cdf_diff(ua, ub);
        top = std::max(top, logs[s]);
    }
    // Boundary terms of the derivative: f(x_1) phi_lam(z - x_1) and f(x_m) phi_lam(z - x_m).
    const double log_lam = std::log(lam);
    const double wl = (z - k.front()) / lam;
    const double wr = (z - k.back()) / lam;
    logs[segs] = v.front() - 0.5 * wl * wl - kLogSqrt2Pi - log_lam;
    logs[segs + 1] = v.back() - 0.5 * wr * wr - kLogSqrt2Pi - log_lam;
    top = std::max({top, logs[segs], logs[segs + 1]});
    if (top == -kInf) return {-kInf, 0.0};

    double dens = 0.0;
    double num = 0.0;
    for (std::size_t s = 0; s < segs; ++s) {
        const double t = std::exp(logs[s] - top);
        dens += t;
        num += beta[s] * t;
    }
    num += std::exp(logs[segs] - top) - std::exp(logs[segs + 1] - top);
    if (dens == 0.0) return {-kInf, 0.0};
    return {top + std::log(dens) - std::log(base_.total_mass()), num / dens};
}

double SmoothedFit::derivative(double z) const noexcept {
    const Eval e = evaluate(z);
    return e.score * std::exp(e.logpdf);
}

double SmoothedFit::cdf(double z) const {
    // F_sm(z) = int F(z - lam u) phi(u) du; the integrand is phi(u) below
    // (z - x_m)/lam and zero above (z - x_1)/lam.
    const double lam = bandwidth_;
    const double lo = std::clamp((z - base_.upper()) / lam, -40.0, 40.0);
    const double hi = std::clamp((z - base_.lower()) / lam, -40.0, 40.0);
    double value = numeric::norm_cdf(lo);
    if (hi > lo) {
        std::vector<double> cuts;
        cuts.reserve(base_.knots().size());
        for (double kk : base_.knots()) cuts.push_back((z - kk) / lam);
        auto integrand = [this, z, lam](double u) { return base_.cdf(z - lam * u) * numeric::norm_pdf(u); };
        numeric::QuadConfig cfg;
        cfg.abs_tolerance = 1e-14;
        value += numeric::integrate(integrand, lo, hi, cuts, cfg);
    }
    return std::clamp(value, 0.0, 1.0);
}

double smoothing_bandwidth(std::span<const double> sample, const LogConcaveFit& full_fit) {
    const std::size_t n = sample.size();
    if (n < 2) throw Error(ErrorKind::DegenerateSample, "bandwidth needs at least two observations");
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double sample_var = ss / static_cast<double>(n - 1);
    const double diff = sample_var - full_fit.moments().variance;
    if (!(diff > 1e-12 * sample_var)) {
        throw Error(ErrorKind::NonPositiveBandwidth,
                    "sample variance does not exceed the fitted variance (difference " + std::to_string(diff) + ")");
    }
    return std::sqrt(diff);
}

SmoothedFit smoothed_mle(const LogConcaveFit& full_fit, double bandwidth) { return SmoothedFit(full_fit, bandwidth); }

// ---------------------------------------------------------------------------
// SymmetrizedSmooth

SymmetrizedSmooth::Eval SymmetrizedSmooth::evaluate(double z) const noexcept {
    const SmoothedFit::Eval right = smooth_.evaluate(center_ + z);
    const SmoothedFit::Eval left = smooth_.evaluate(center_ - z);
    const double logg = numeric::log_add_exp(right.logpdf, left.logpdf) - std::numbers::ln2;
    if (logg == -kInf) return {-kInf, 0.0, 0.5};
    const double w_right = sigmoid(right.logpdf - left.logpdf);
    const double w_left = sigmoid(left.logpdf - right.logpdf);
    return {logg, w_right * right.score - w_left * left.score, w_right};
}

double SymmetrizedSmooth::cdf(double z) const {
    if (z == 0.0) return 0.5;
    if (z < 0.0) return 0.5 * (smooth_.cdf(center_ + z) + (1.0 - smooth_.cdf(center_ - z)));
    return 0.5 * ((1.0 - smooth_.cdf(center_ - z)) + smooth_.cdf(center_ + z));
}

// ---------------------------------------------------------------------------
// ScoreEstimate

ScoreEstimate::ScoreEstimate(ScoreKind kind, double center, LogConcaveFit fit)
    : kind_(kind), center_(center), impl_(std::move(fit)) {
    if (kind == ScoreKind::SymSmoothed) {
        throw Error(ErrorKind::InvalidArgument, "smoothed estimates are built from a SymmetrizedSmooth");
    }
}

ScoreEstimate::ScoreEstimate(double center, SymmetrizedSmooth smooth)
    : kind_(ScoreKind::SymSmoothed), center_(center), impl_(std::move(smooth)) {}

double ScoreEstimate::pdf(double z) const noexcept { return std::exp(logpdf(z)); }

double ScoreEstimate::logpdf(double z) const noexcept {
    if (const auto* f = fit()) return f->logpdf(z);
    return smoothed()->evaluate(z).logpdf;
}

double ScoreEstimate::score(double z) const noexcept {
    if (const auto* f = fit()) return f->score(z);
    return smoothed()->evaluate(z).score;
}

double ScoreEstimate::cdf(double z) const {
    if (const auto* f = fit()) return f->cdf(z);
    return smoothed()->cdf(z);
}

double ScoreEstimate::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) {
        throw Error(ErrorKind::QuantileOutOfRange, "quantile level must lie in (0,1)");
    }
    if (q == 0.5) return 0.0;
    if (q < 0.5) return -quantile(1.0 - q);
    if (const auto* f = fit()) return f->quantile(q);

    const SymmetrizedSmooth& g = *smoothed();
    const auto& base = g.smooth().base();
    const double lam = g.smooth().bandwidth();
    double hi = std::max(std::abs(base.upper() - center_), std::abs(base.lower() - center_)) + 10.0 * lam;
    int guard = 0;
    while (g.cdf(hi) < q) {
        hi *= 2.0;
        if (++guard > 60) throw Error(ErrorKind::QuantileOutOfRange, "quantile lies beyond the representable range");
    }
    return numeric::solve_monotone([&g, q](double z) { return g.cdf(z) - q; }, 0.0, hi, 1e-14 * hi);
}

double ScoreEstimate::support_lower() const noexcept {
    if (const auto* f = fit()) return f->lower();
    return -kInf;
}

double ScoreEstimate::support_upper() const noexcept {
    if (const auto* f = fit()) return f->upper();
    return kInf;
}

std::vector<double> ScoreEstimate::breakpoints() const {
    if (const auto* f = fit()) return f->knots();
    const auto& base = smoothed()->smooth().base();
    std::vector<double> offsets;
    offsets.reserve(base.knots().size() + 1);
    for (double k : base.knots()) offsets.push_back(k - center_);
    offsets.push_back(0.0);
    return mirror(mirrored_abscissae(offsets, 0.0));
}

double ScoreEstimate::information(double xi) const {
    if (std::isnan(xi) || xi < 0.0) throw Error(ErrorKind::InvalidArgument, "truncation point must be non-negative");
    if (const auto* f = fit()) {
        const auto& k = f->knots();
        const auto& beta = f->slopes();
        double acc = 0.0;
        for (std::size_t s = 0; s < beta.size(); ++s) {
            const double a = std::max(k[s], -xi);
            const double b = std::min(k[s + 1], xi);
            if (b > a) acc += beta[s] * beta[s] * (f->cdf(b) - f->cdf(a));
        }
        return acc;
    }
    const SymmetrizedSmooth& g = *smoothed();
    const auto& base = g.smooth().base();
    const double reach = std::max(std::abs(base.upper() - center_), std::abs(base.lower() - center_)) +
                         40.0 * g.smooth().bandwidth();
    const double upper = std::min(xi, reach);
    if (upper <= 0.0) return 0.0;
    auto integrand = [&g](double z) {
        const auto e = g.evaluate(z);
        return e.score * e.score * std::exp(e.logpdf);
    };
    const std::vector<double> cuts = breakpoints();
    return 2.0 * numeric::integrate(integrand, 0.0, upper, cuts);
}

DensityView ScoreEstimate::view() const {
    DensityView v;
    v.pdf = [self = *this](double z) { return self.pdf(z); };
    v.lower = support_lower();
    v.upper = support_upper();
    v.breakpoints = breakpoints();
    return v;
}

// ---------------------------------------------------------------------------
// Builders

ScoreEstimate partial_mle(std::span<const double> sample, double theta_bar, const FitConfig& cfg) {
    return ScoreEstimate(ScoreKind::PartialMLE, theta_bar, fit_symmetric_logconcave(sample, theta_bar, cfg));
}

ScoreEstimate geo_sym(std::span<const double> sample, double theta_bar, const FitConfig& cfg) {
    const LogConcaveFit full = fit_weighted_logconcave(empirical_sample(sample), cfg);
    const double a = std::min(full.upper() - theta_bar, theta_bar - full.lower());
    if (!(a > 0.0)) {
        throw Error(ErrorKind::EmptySupport, "the centre does not lie strictly inside the data range");
    }
    // Kinks of z -> psi(c+z) + psi(c-z) on [0, a] sit at |k - c| for knots k.
    std::vector<double> offsets{0.0, a};
    for (double k : full.knots()) {
        const double d = std::abs(k - theta_bar);
        if (d > 0.0 && d < a) offsets.push_back(d);
    }
    std::vector<double> positive = mirrored_abscissae(offsets, 1e-10 * a);
    positive.back() = a;
    std::vector<double> knots = mirror(positive);

    auto psi = [&full](double x) { return full.logpdf(std::clamp(x, full.lower(), full.upper())); };
    std::vector<double> logvals(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const double z = std::abs(knots[i]);
        logvals[i] = 0.5 * (psi(theta_bar + z) + psi(theta_bar - z));
    }
    const LogConcaveFit unnormalised(knots, logvals);
    const double log_mass = std::log(unnormalised.total_mass());
    for (double& lv : logvals) lv -= log_mass;
    return ScoreEstimate(ScoreKind::GeoSym, theta_bar, LogConcaveFit(std::move(knots), std::move(logvals)));
}

ScoreEstimate sym_smoothed(std::span<const double> sample, double theta_bar, const FitConfig& cfg) {
    LogConcaveFit full = fit_weighted_logconcave(empirical_sample(sample), cfg);
    const double lam = smoothing_bandwidth(sample, full);
    return ScoreEstimate(theta_bar, SymmetrizedSmooth(SmoothedFit(std::move(full), lam), theta_bar));
}

ScoreEstimate build_score_estimate(ScoreKind kind, std::span<const double> sample, double theta_bar,
                                   const FitConfig& cfg) {
    switch (kind) {
        case ScoreKind::PartialMLE: return partial_mle(sample, theta_bar, cfg);
        case ScoreKind::GeoSym: return geo_sym(sample, theta_bar, cfg);
        case ScoreKind::SymSmoothed: return sym_smoothed(sample, theta_bar, cfg);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown score kind");
}

}  // namespace loclace
