#include "loclace/error.hpp"

namespace loclace {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DegenerateSample: return "DegenerateSample";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::QuantileOutOfRange: return "QuantileOutOfRange";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::EmptySupport: return "EmptySupport";
        case ErrorKind::NonPositiveBandwidth: return "NonPositiveBandwidth";
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::ZeroInformation: return "ZeroInformation";
        case ErrorKind::ZeroMad: return "ZeroMad";
        case ErrorKind::MissingEntry: return "MissingEntry";
        case ErrorKind::InfiniteInformation: return "InfiniteInformation";
    }
    return "Unknown";
}

}  // namespace loclace
