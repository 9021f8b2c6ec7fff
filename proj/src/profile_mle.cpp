#include "loclace/profile_mle.hpp"

#include "loclace/error.hpp"
#include "loclace/symlc.hpp"

#include <algorithm>
#include <cmath>

namespace loclace {

void GridConfig::validate() const {
    if (coarse_points < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least three coarse points");
    if (refine_rounds < 0) throw Error(ErrorKind::InvalidArgument, "refinement rounds must be non-negative");
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "refinement shrink factor must lie in (0,1)");
    }
}

double profile_criterion(std::span<const double> sample, double theta, const FitConfig& cfg) {
    return fit_symmetric_logconcave(sample, theta, cfg).criterion_value();
}

MleEstimate fit_full_mle(std::span<const double> sample, const GridConfig& grid, const FitConfig& cfg) {
    grid.validate();
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations");
    const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        throw Error(ErrorKind::DegenerateSample, "the MLE does not exist when all observations coincide");
    }

    std::vector<std::pair<double, double>> trace;
    double best_theta = lo;
    double best_value = -kInf;

    // Evaluates coarse_points equally spaced values on [a, b] and updates the incumbent.
    auto scan = [&](double a, double b) {
        const int m = grid.coarse_points;
        std::vector<std::pair<double, double>> round;
        round.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const double t = j == m - 1 ? b : a + (b - a) * static_cast<double>(j) / (m - 1);
            round.emplace_back(t, profile_criterion(sample, t, cfg));
        }
        trace.insert(trace.end(), round.begin(), round.end());
        for (const auto& [t, v] : trace) best_value = std::max(best_value, v);
        const double band = 1e-12 * (1.0 + std::abs(best_value));
        double chosen = kInf;
        for (const auto& [t, v] : trace) {
            if (v >= best_value - band) chosen = std::min(chosen, t);
        }
        best_theta = chosen;
    };

    scan(lo, hi);
    double half_width = (hi - lo) / (grid.coarse_points - 1);
    for (int r = 0; r < grid.refine_rounds; ++r) {
        scan(std::max(lo, best_theta - half_width), std::min(hi, best_theta + half_width));
        half_width *= grid.refine_shrink;
    }

    LogConcaveFit fit = fit_symmetric_logconcave(sample, best_theta, cfg);
    const double criterion = fit.criterion_value();
    return MleEstimate{best_theta, std::move(fit), criterion, std::move(trace)};
}

}  // namespace loclace
