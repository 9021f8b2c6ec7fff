#pragma once

// Classical adaptive location estimators used as benchmarks:
//  - a kernel one-step estimator with a symmetrised Gaussian kernel density
//    of the median residuals, truncated at d * MAD with bandwidth t * MAD;
//  - a linearised signed-rank estimator whose score is a sine-series
//    expansion on the rank scale, with coefficients estimated by difference
//    quotients at scale rho * MAD.
// Both start from the sample median and report a Wald interval.

#include "loclace/onestep.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>

namespace loclace {

struct StoneConfig {
    double d = 10.0;  // truncation multiplier
    double t = 0.5;   // bandwidth multiplier

    void validate() const;
    bool operator==(const StoneConfig&) const = default;
};

struct BeranConfig {
    int basis_count = 10;
    double rho = 0.5;

    void validate() const;
    bool operator==(const BeranConfig&) const = default;
};

/// Median absolute deviation from the median (no consistency factor).
double median_absolute_deviation(std::span<const double> sample);

/// Throws ZeroMad when the MAD vanishes.
LocationEstimate stone_estimate(std::span<const double> sample, const StoneConfig& cfg, double level = 0.95);

/// Symmetrised kernel density of the median residuals used by stone_estimate,
/// evaluated at z (residual scale). Exposed for testing.
double stone_kernel_density(std::span<const double> sample, const StoneConfig& cfg, double z);

/// Throws DegenerateSample when the MAD vanishes and ZeroInformation when all
/// estimated coefficients are zero.
LocationEstimate beran_estimate(std::span<const double> sample, const BeranConfig& cfg, double level = 0.95);

enum class Regime { Optimal, NonOptimal };
std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view name);

/// Tabulated tuning pairs keyed by (family name, n, regime).
struct TuningTable {
    using Key = std::tuple<std::string, int, Regime>;
    std::map<Key, StoneConfig> stone;
    std::map<Key, BeranConfig> beran;

    static TuningTable from_json(std::string_view text);
    /// The table shipped with the library.
    static const TuningTable& builtin();
};

/// Exact lookup; throws MissingEntry for an absent key.
StoneConfig tuning_lookup_stone(const TuningTable& table, const std::string& family, int n, Regime regime);
BeranConfig tuning_lookup_beran(const TuningTable& table, const std::string& family, int n, Regime regime);

/// The tabulated sample size closest to n for the family (ties to the smaller);
/// throws MissingEntry when the family is absent.
int nearest_tabulated_n(const TuningTable& table, const std::string& family, int n);

}  // namespace loclace
