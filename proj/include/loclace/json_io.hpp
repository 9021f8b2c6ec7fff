#pragma once

// JSON serialisation. Reals are written with 17 significant digits so values
// round-trip exactly; non-finite reals are written as the strings "inf",
// "-inf" and "nan". Readers re-validate every invariant.

#include "loclace/comparators.hpp"
#include "loclace/onestep.hpp"
#include "loclace/profile_mle.hpp"
#include "loclace/simharness.hpp"
#include "loclace/symlc.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace loclace {

using Json = nlohmann::ordered_json;

/// Serialises with 17-digit reals; indent < 0 gives a single line.
std::string dump_json(const Json& value, int indent = 2);
Json parse_json(const std::string& text);

/// Reads a real that may be encoded as one of the non-finite strings.
double json_real(const Json& value);

Json to_json(const LogConcaveFit& fit);
LogConcaveFit fit_from_json(const Json& j);

Json to_json(const ScoreEstimate& estimate);
ScoreEstimate score_estimate_from_json(const Json& j);

Json to_json(const LocationEstimate& estimate);
LocationEstimate location_estimate_from_json(const Json& j);

Json to_json(const MleEstimate& estimate);
MleEstimate mle_estimate_from_json(const Json& j);

Json to_json(const StoneConfig& c);
Json to_json(const BeranConfig& c);

Json to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_spec_from_json(const Json& j);

Json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j);

Json to_json(const SimulationReport& report);

}  // namespace loclace
