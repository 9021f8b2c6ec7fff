#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loclace {

enum class ErrorKind {
    InvalidArgument,
    DegenerateSample,
    NonConvergence,
    QuantileOutOfRange,
    QuadratureFailure,
    EmptySupport,
    NonPositiveBandwidth,
    EmptySample,
    ZeroInformation,
    ZeroMad,
    MissingEntry,
    InfiniteInformation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI, the simulation harness) can classify it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace loclace
