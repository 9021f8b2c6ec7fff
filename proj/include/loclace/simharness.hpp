#pragma once

// Monte Carlo comparison of location estimators across reference families and
// sample sizes. Every replication draws its sample from a seed derived only
// from (experiment seed, family, n, replication index), and results are
// reduced in replication order, so reports do not depend on the number of
// worker threads.

#include "loclace/comparators.hpp"
#include "loclace/onestep.hpp"
#include "loclace/profile_mle.hpp"
#include "loclace/refdists.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace loclace {

struct EstimatorSpec {
    enum class Type { OneStep, Mle, Stone, Beran, OracleMean };
    Type type = Type::OneStep;
    std::string label;  // empty: derived from the settings
    OneStepConfig onestep{};
    GridConfig grid{};
    Regime regime = Regime::Optimal;       // Stone/Beran: table lookup ...
    std::optional<StoneConfig> stone;      // ... unless given explicitly
    std::optional<BeranConfig> beran;

    std::string display_label() const;
    bool has_interval() const noexcept { return type != Type::Mle; }
    bool is_comparator() const noexcept { return type == Type::Stone || type == Type::Beran; }
};

std::string_view to_string(EstimatorSpec::Type t) noexcept;
EstimatorSpec::Type parse_estimator_type(std::string_view name);

struct ExperimentConfig {
    std::vector<std::string> families;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 100;
    std::vector<EstimatorSpec> estimators;
    std::uint64_t seed = 1;
    double level = 0.95;
    unsigned parallel_workers = 1;

    void validate() const;
};

/// Families, sizes, estimators and 3000 replications of the full published
/// simulation design. Seed, level and workers are taken from `base`.
ExperimentConfig paper_scale_config(const ExperimentConfig& base);

struct ReportRow {
    std::string family;
    std::size_t n = 0;
    std::string estimator;
    bool comparator = false;
    bool has_interval = false;
    double fisher_info = 0.0;  // of the true family
    double efficiency = 0.0;
    double efficiency_se = 0.0;
    double coverage = 0.0;
    double coverage_se = 0.0;
    double mean_ci_length = 0.0;
    double mean_ci_length_se = 0.0;
    double mse = 0.0;
    double mse_se = 0.0;
    std::size_t successes = 0;
    std::size_t failures = 0;
};

struct SimulationReport {
    std::vector<ReportRow> rows;
};

/// Seed of replication `rep` for (family, n) under the experiment seed.
std::uint64_t replication_seed(std::uint64_t seed, const std::string& family, std::size_t n, std::size_t rep);

/// Throws InfiniteInformation for families with infinite Fisher information.
SimulationReport run_experiment(const ExperimentConfig& cfg);

/// Long-format CSV: family,n,estimator,metric,value,mc_stderr.
std::string report_csv(const SimulationReport& report);

/// Per-figure CSVs with columns family,n,estimator,value,lower,upper where the
/// band is +-2 Monte Carlo standard errors. Keys are file names.
std::vector<std::pair<std::string, std::string>> plot_csvs(const SimulationReport& report);

/// Index of the candidate with the largest estimated efficiency (smallest
/// Monte Carlo variance) on `inner_replications` common samples; ties go to
/// the earlier candidate. Failing replications are dropped per candidate.
std::size_t tune_grid_search(const std::vector<std::function<double(std::span<const double>)>>& candidates,
                             const ReferenceDistribution& dist, std::size_t n, std::size_t inner_replications,
                             std::uint64_t seed);

/// Grid search over Stone pairs; the grid is examined in lexicographic order
/// so ties resolve to the lexicographically smaller pair.
StoneConfig tune_grid_search(const ReferenceDistribution& dist, std::size_t n, std::vector<StoneConfig> grid,
                             std::size_t inner_replications = 100, std::uint64_t seed = 1);
BeranConfig tune_grid_search(const ReferenceDistribution& dist, std::size_t n, std::vector<BeranConfig> grid,
                             std::size_t inner_replications = 100, std::uint64_t seed = 1);

/// The published search grids: d in {10,...,80}, t in {0.1,...,0.6}; basis
/// counts {10,...,50}, rho in {0.1,...,1.5}.
std::vector<StoneConfig> default_stone_grid();
std::vector<BeranConfig> default_beran_grid();

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace loclace
