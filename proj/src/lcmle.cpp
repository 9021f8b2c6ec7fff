#include "loclace/lcmle.hpp"

#include "loclace/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace loclace {

using numeric::seg_j00;
using numeric::seg_j01;
using numeric::seg_j02;
using numeric::seg_j10;
using numeric::seg_j11;
using numeric::seg_j20;

WeightedSample make_weighted_sample(std::span<const double> points, std::span<const double> weights) {
    if (points.size() != weights.size()) {
        throw Error(ErrorKind::InvalidArgument, "points and weights differ in length");
    }
    if (points.empty()) throw Error(ErrorKind::EmptySample, "no points");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw Error(ErrorKind::InvalidArgument, "non-finite point");
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
            throw Error(ErrorKind::InvalidArgument, "weights must be positive and finite");
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    WeightedSample out;
    double total = 0.0;
    for (std::size_t idx : order) {
        if (!out.points.empty() && out.points.back() == points[idx]) {
            out.weights.back() += weights[idx];
        } else {
            out.points.push_back(points[idx]);
            out.weights.push_back(weights[idx]);
        }
        total += weights[idx];
    }
    for (double& w : out.weights) w /= total;
    return out;
}

WeightedSample empirical_sample(std::span<const double> observations) {
    std::vector<double> w(observations.size(), 1.0);
    return make_weighted_sample(observations, w);
}

// ---------------------------------------------------------------------------
// LogConcaveFit

LogConcaveFit::LogConcaveFit(std::vector<double> knots, std::vector<double> logvals)
    : knots_(std::move(knots)), logvals_(std::move(logvals)) {
    init();
    criterion_value_ = std::numeric_limits<double>::quiet_NaN();
}

LogConcaveFit::LogConcaveFit(std::vector<double> knots, std::vector<double> logvals, double criterion_value)
    : knots_(std::move(knots)), logvals_(std::move(logvals)), criterion_value_(criterion_value) {
    init();
}

void LogConcaveFit::init() {
    if (knots_.size() != logvals_.size()) {
        throw Error(ErrorKind::InvalidArgument, "knots and logvals differ in length");
    }
    if (knots_.size() < 2) throw Error(ErrorKind::InvalidArgument, "a fit needs at least two knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i]) || !std::isfinite(logvals_[i])) {
            throw Error(ErrorKind::InvalidArgument, "knots and logvals must be finite");
        }
        if (i > 0 && !(knots_[i] > knots_[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "knots must be strictly increasing");
        }
    }
    const std::size_t segs = knots_.size() - 1;
    slopes_.resize(segs);
    for (std::size_t i = 0; i < segs; ++i) {
        slopes_[i] = (logvals_[i + 1] - logvals_[i]) / (knots_[i + 1] - knots_[i]);
    }
    for (std::size_t i = 1; i < segs; ++i) {
        // Relative slope tolerance plus the rounding noise a slope inherits
        // from its endpoint values over a very short segment.
        const double noise = 4e-16 * (1.0 + std::abs(logvals_[i - 1]) + std::abs(logvals_[i]) + std::abs(logvals_[i + 1])) *
                             (1.0 / (knots_[i] - knots_[i - 1]) + 1.0 / (knots_[i + 1] - knots_[i]));
        const double tol = 1e-9 * (1.0 + std::max(std::abs(slopes_[i]), std::abs(slopes_[i - 1]))) + noise;
        if (slopes_[i] > slopes_[i - 1] + tol) {
            throw Error(ErrorKind::InvalidArgument, "log-density is not concave");
        }
    }
    cumulative_.assign(knots_.size(), 0.0);
    for (std::size_t i = 0; i < segs; ++i) {
        const double len = knots_[i + 1] - knots_[i];
        cumulative_[i + 1] = cumulative_[i] + len * seg_j00(logvals_[i], logvals_[i + 1]);
    }
    total_mass_ = cumulative_.back();
}

Evaluation LogConcaveFit::evaluate(double x) const noexcept {
    if (!(x >= knots_.front() && x <= knots_.back())) return {0.0, -kInf, 0.0};
    if (x == knots_.back()) {
        return {std::exp(logvals_.back()), logvals_.back(), slopes_.back()};
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double lp = logvals_[i] + slopes_[i] * (x - knots_[i]);
    return {std::exp(lp), lp, slopes_[i]};
}

double LogConcaveFit::cdf(double x) const noexcept {
    if (std::isnan(x)) return x;
    if (x <= knots_.front()) return 0.0;
    if (x >= knots_.back()) return 1.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double h = x - knots_[i];
    const double lp = logvals_[i] + slopes_[i] * h;
    return (cumulative_[i] + h * seg_j00(logvals_[i], lp)) / total_mass_;
}

double LogConcaveFit::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) {
        throw Error(ErrorKind::QuantileOutOfRange, "quantile level must lie in (0,1)");
    }
    const double target = q * total_mass_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
    const double rem = target - cumulative_[i];
    const double beta = slopes_[i];
    const double scaled = rem * std::exp(-logvals_[i]);
    double x = 0.0;
    if (beta == 0.0) {
        x = knots_[i] + scaled;
    } else {
        x = knots_[i] + std::log1p(beta * scaled) / beta;
    }
    if (std::isnan(x)) x = knots_[i + 1];
    return std::clamp(x, knots_[i], knots_[i + 1]);
}

Moments LogConcaveFit::moments() const noexcept {
    double m1 = 0.0;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double len = knots_[i + 1] - knots_[i];
        const double r = logvals_[i];
        const double s = logvals_[i + 1];
        m1 += knots_[i] * len * seg_j00(r, s) + len * len * seg_j01(r, s);
    }
    const double mean = m1 / total_mass_;
    double m2 = 0.0;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double len = knots_[i + 1] - knots_[i];
        const double r = logvals_[i];
        const double s = logvals_[i + 1];
        const double a = knots_[i] - mean;
        m2 += a * a * len * seg_j00(r, s) + 2.0 * a * len * len * seg_j01(r, s) +
              len * len * len * seg_j02(r, s);
    }
    return {mean, std::max(0.0, m2 / total_mass_)};
}

double LogConcaveFit::criterion(const WeightedSample& sample) const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) acc += sample.weights[i] * logpdf(sample.points[i]);
    return acc - total_mass_;
}

// ---------------------------------------------------------------------------
// Active-set solver.
//
// Works on positions rescaled to [0,1]. The candidate log-density is linear
// between the current knot set; within that subspace the criterion is smooth
// and strictly concave in the knot values and has a tridiagonal Hessian, so
// each subproblem is solved by damped Newton. Knots are added where the
// directional derivative towards a new concave kink is positive, and removed
// when a Newton candidate violates concavity (after stepping back to the
// feasible boundary).

namespace {

class ActiveSetSolver {
public:
    ActiveSetSolver(std::vector<double> u, std::vector<double> w, const FitConfig& cfg)
        : u_(std::move(u)), w_(std::move(w)), cfg_(cfg) {}

    void run();

    const std::vector<int>& knots() const { return knots_; }
    const std::vector<double>& values() const { return eta_; }

private:
    void build_restricted();
    double objective(const std::vector<double>& e) const;
    void newton(std::vector<double>& e);
    std::vector<double> curvature(const std::vector<double>& e) const;
    std::vector<double> full_values() const;
    bool add_best_knot();
    void tick();

    std::vector<double> u_;
    std::vector<double> w_;
    FitConfig cfg_;
    std::vector<int> knots_;
    std::vector<double> eta_;
    std::vector<double> W_;  // effective weights at knots
    std::vector<double> D_;  // knot spacings
    int iterations_ = 0;
};

void ActiveSetSolver::tick() {
    if (++iterations_ > cfg_.max_iterations) {
        throw Error(ErrorKind::NonConvergence, "active-set iterations exhausted");
    }
}

void ActiveSetSolver::build_restricted() {
    const std::size_t p = knots_.size();
    W_.assign(p, 0.0);
    D_.assign(p - 1, 0.0);
    for (std::size_t a = 0; a + 1 < p; ++a) {
        const int lo = knots_[a];
        const int hi = knots_[a + 1];
        const double span = u_[hi] - u_[lo];
        D_[a] = span;
        W_[a] += (a == 0) ? w_[lo] : 0.0;
        for (int i = lo + 1; i < hi; ++i) {
            const double lam = (u_[i] - u_[lo]) / span;
            W_[a] += (1.0 - lam) * w_[i];
            W_[a + 1] += lam * w_[i];
        }
        W_[a + 1] += w_[hi];
    }
}

double ActiveSetSolver::objective(const std::vector<double>& e) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < e.size(); ++a) acc += W_[a] * e[a];
    for (std::size_t a = 0; a + 1 < e.size(); ++a) acc -= D_[a] * seg_j00(e[a], e[a + 1]);
    return std::isfinite(acc) ? acc : -kInf;
}

void ActiveSetSolver::newton(std::vector<double>& e) {
    const std::size_t p = e.size();
    std::vector<double> grad(p), diag(p), off(p > 1 ? p - 1 : 0), step(p), trial(p);
    std::vector<double> cprime(p), dprime(p);
    double current = objective(e);
    double last_small = kInf;
    for (int iter = 0; iter < 200; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(diag.begin(), diag.end(), 0.0);
        for (std::size_t a = 0; a < p; ++a) grad[a] = W_[a];
        for (std::size_t a = 0; a + 1 < p; ++a) {
            const double r = e[a];
            const double s = e[a + 1];
            grad[a] -= D_[a] * seg_j10(r, s);
            grad[a + 1] -= D_[a] * seg_j01(r, s);
            diag[a] += D_[a] * seg_j20(r, s);
            diag[a + 1] += D_[a] * seg_j02(r, s);
            off[a] = D_[a] * seg_j11(r, s);
        }
        // Thomas algorithm for the symmetric positive-definite tridiagonal system.
        cprime[0] = p > 1 ? off[0] / diag[0] : 0.0;
        dprime[0] = grad[0] / diag[0];
        for (std::size_t a = 1; a < p; ++a) {
            const double denom = diag[a] - off[a - 1] * cprime[a - 1];
            cprime[a] = (a + 1 < p) ? off[a] / denom : 0.0;
            dprime[a] = (grad[a] - off[a - 1] * dprime[a - 1]) / denom;
        }
        step[p - 1] = dprime[p - 1];
        for (std::size_t a = p - 1; a-- > 0;) step[a] = dprime[a] - cprime[a] * step[a + 1];

        const double decrement = std::inner_product(grad.begin(), grad.end(), step.begin(), 0.0);
        if (std::isnan(decrement)) throw Error(ErrorKind::NonConvergence, "Newton step is not finite");
        if (!(decrement > 1e-24)) return;
        // Near the optimum the predicted gain falls below the objective's
        // rounding, so the line search cannot see progress while the gradient
        // (normalisation included) is still ~1e-8. Take full steps until the
        // decrement stops shrinking.
        if (decrement < 1e-10) {
            if (!(decrement < last_small)) return;
            last_small = decrement;
            for (std::size_t a = 0; a < p; ++a) e[a] += step[a];
            current = objective(e);
            continue;
        }

        double t = 1.0;
        double next = -kInf;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t a = 0; a < p; ++a) trial[a] = e[a] + t * step[a];
            next = objective(trial);
            if (next >= current + 1e-4 * t * decrement) break;
            t *= 0.5;
        }
        if (!(next >= current)) {
            // Line search stalled; accept only if already at numerical precision.
            if (decrement < cfg_.criterion_tolerance * 1e-3) return;
            throw Error(ErrorKind::NonConvergence, "Newton line search failed");
        }
        e = trial;
        current = next;
    }
    throw Error(ErrorKind::NonConvergence, "Newton iterations exhausted");
}

// Change of slope at each interior knot (<= 0 when concave).
std::vector<double> ActiveSetSolver::curvature(const std::vector<double>& e) const {
    std::vector<double> c(e.size(), 0.0);
    for (std::size_t a = 1; a + 1 < e.size(); ++a) {
        c[a] = (e[a + 1] - e[a]) / D_[a] - (e[a] - e[a - 1]) / D_[a - 1];
    }
    return c;
}

std::vector<double> ActiveSetSolver::full_values() const {
    std::vector<double> phi(u_.size());
    for (std::size_t a = 0; a + 1 < knots_.size(); ++a) {
        const int lo = knots_[a];
        const int hi = knots_[a + 1];
        const double slope = (eta_[a + 1] - eta_[a]) / (u_[hi] - u_[lo]);
        phi[lo] = eta_[a];
        for (int i = lo + 1; i < hi; ++i) phi[i] = eta_[a] + slope * (u_[i] - u_[lo]);
    }
    phi.back() = eta_.back();
    return phi;
}

// Directional derivative of the criterion towards phi - (u - u_j)_+ for every
// non-knot j; adds the best one when it is positive beyond tolerance.
bool ActiveSetSolver::add_best_knot() {
    const std::size_t m = u_.size();
    if (knots_.size() == m) return false;
    const std::vector<double> phi = full_values();

    // Backward recursions: A_j = int_{u_j}^1 e^phi, B_j = int_{u_j}^1 (u-u_j) e^phi,
    // S_j = sum_{i>j} w_i (u_i - u_j), Wt_j = sum_{i>=j} w_i.
    double A = 0.0;
    double B = 0.0;
    double S = 0.0;
    double Wt = w_[m - 1];
    double best = cfg_.slope_tolerance;
    int best_j = -1;
    std::size_t knot_cursor = knots_.size() - 1;
    for (std::size_t j = m - 1; j-- > 0;) {
        const double h = u_[j + 1] - u_[j];
        const double r = phi[j];
        const double s = phi[j + 1];
        B = B + h * A + h * h * seg_j01(r, s);
        A = A + h * seg_j00(r, s);
        S = S + h * Wt;
        Wt += w_[j];
        while (knot_cursor > 0 && knots_[knot_cursor] > static_cast<int>(j)) --knot_cursor;
        if (j == 0 || knots_[knot_cursor] == static_cast<int>(j)) continue;
        const double deriv = B - S;
        if (deriv > best) {
            best = deriv;
            best_j = static_cast<int>(j);
        }
    }
    if (best_j < 0) return false;

    const auto pos = std::upper_bound(knots_.begin(), knots_.end(), best_j);
    const auto a = static_cast<std::size_t>(pos - knots_.begin());
    eta_.insert(eta_.begin() + static_cast<std::ptrdiff_t>(a), phi[static_cast<std::size_t>(best_j)]);
    knots_.insert(pos, best_j);
    return true;
}

void ActiveSetSolver::run() {
    const int m = static_cast<int>(u_.size());
    knots_ = {0, m - 1};
    eta_ = {0.0, 0.0};
    build_restricted();
    newton(eta_);

    while (true) {
        tick();
        if (!add_best_knot()) break;
        build_restricted();
        std::vector<double> cand = eta_;
        newton(cand);
        while (true) {
            const std::vector<double> c_new = curvature(cand);
            const std::vector<double> c_old = curvature(eta_);
            double t = 1.0;
            std::size_t worst = 0;
            for (std::size_t a = 1; a + 1 < cand.size(); ++a) {
                const double scale = 1e-12 * (1.0 + std::abs((cand[a] - cand[a - 1]) / D_[a - 1]));
                if (c_new[a] > scale) {
                    const double old = std::min(c_old[a], 0.0);
                    const double ta = old / (old - c_new[a]);
                    if (ta < t) {
                        t = ta;
                        worst = a;
                    }
                }
            }
            if (worst == 0) {
                eta_ = std::move(cand);
                break;
            }
            tick();
            for (std::size_t a = 0; a < eta_.size(); ++a) eta_[a] += t * (cand[a] - eta_[a]);
            // Drop the binding knot and any other knot that became (numerically) straight.
            const std::vector<double> c_now = curvature(eta_);
            std::vector<int> keep_knots;
            std::vector<double> keep_vals;
            for (std::size_t a = 0; a < eta_.size(); ++a) {
                if (a > 0 && a + 1 < eta_.size()) {
                    const double left_slope = (eta_[a] - eta_[a - 1]) / D_[a - 1];
                    if (a == worst || c_now[a] > -1e-13 * (1.0 + std::abs(left_slope))) continue;
                }
                keep_knots.push_back(knots_[a]);
                keep_vals.push_back(eta_[a]);
            }
            knots_ = std::move(keep_knots);
            eta_ = std::move(keep_vals);
            build_restricted();
            cand = eta_;
            newton(cand);
        }
    }
}

}  // namespace

LogConcaveFit fit_weighted_logconcave(const WeightedSample& sample, const FitConfig& cfg) {
    if (sample.size() < 2) {
        throw Error(ErrorKind::DegenerateSample,
                    "log-concave MLE does not exist for a sample with one distinct point");
    }
    if (!(cfg.criterion_tolerance > 0.0) || !(cfg.slope_tolerance > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
    }
    const double lo = sample.points.front();
    const double scale = sample.points.back() - lo;
    std::vector<double> u(sample.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (sample.points[i] - lo) / scale;
    u.front() = 0.0;
    u.back() = 1.0;

    ActiveSetSolver solver(std::move(u), sample.weights, cfg);
    solver.run();

    const double log_scale = std::log(scale);
    std::vector<double> knots;
    std::vector<double> logvals;
    for (std::size_t a = 0; a < solver.knots().size(); ++a) {
        knots.push_back(sample.points[static_cast<std::size_t>(solver.knots()[a])]);
        logvals.push_back(solver.values()[a] - log_scale);
    }
    LogConcaveFit provisional(std::move(knots), std::move(logvals));
    const double crit = provisional.criterion(sample);
    return LogConcaveFit(provisional.knots(), provisional.logvals(), crit);
}

// ---------------------------------------------------------------------------

DensityView view_of(const LogConcaveFit& fit) {
    DensityView v;
    v.pdf = [fit](double x) { return fit.pdf(x); };
    v.lower = fit.lower();
    v.upper = fit.upper();
    v.breakpoints = fit.knots();
    return v;
}

double hellinger(const DensityView& a, const DensityView& b, const numeric::QuadConfig& quad) {
    const double lo = std::min(a.lower, b.lower);
    const double hi = std::max(a.upper, b.upper);
    std::vector<double> cuts = a.breakpoints;
    cuts.insert(cuts.end(), b.breakpoints.begin(), b.breakpoints.end());
    for (double x : {a.lower, a.upper, b.lower, b.upper}) {
        if (std::isfinite(x)) cuts.push_back(x);
    }
    auto integrand = [&](double x) {
        const double d = std::sqrt(std::max(0.0, a.pdf(x))) - std::sqrt(std::max(0.0, b.pdf(x)));
        return d * d;
    };
    const double h2 = 0.5 * numeric::integrate(integrand, lo, hi, cuts, quad);
    return std::sqrt(std::clamp(h2, 0.0, 1.0));
}

}  // namespace loclace
