#pragma once

// Joint maximum likelihood for (theta, g) in the symmetric log-concave
// location model. For fixed theta the inner maximiser is the symmetric
// log-concave MLE of the centred data; theta is found by grid search over
// the data range with successive local refinement.

#include "loclace/lcmle.hpp"

#include <span>
#include <utility>
#include <vector>

namespace loclace {

struct GridConfig {
    int coarse_points = 101;
    int refine_rounds = 4;
    double refine_shrink = 0.1;

    void validate() const;
};

struct MleEstimate {
    double theta = 0.0;
    LogConcaveFit fit;  // centred: symmetric about zero
    double criterion = 0.0;
    std::vector<std::pair<double, double>> grid_trace;  // (theta, criterion) in visiting order
};

/// (1/n) sum_i psi_theta(x_i - theta) - int exp(psi_theta), with psi_theta the
/// symmetric log-concave MLE at centre theta. Throws DegenerateSample when
/// every observation equals theta.
double profile_criterion(std::span<const double> sample, double theta, const FitConfig& cfg = {});

/// Coarse grid of `coarse_points` over [min x, max x], then `refine_rounds`
/// grids of the same size around the incumbent, each window `refine_shrink`
/// times the previous one. Among criteria within 1e-12 (relative) of the best
/// the smallest theta wins.
MleEstimate fit_full_mle(std::span<const double> sample, const GridConfig& grid = {}, const FitConfig& cfg = {});

}  // namespace loclace
