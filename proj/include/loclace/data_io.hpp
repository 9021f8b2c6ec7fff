#pragma once

#include <filesystem>
#include <istream>
#include <vector>

namespace loclace {

/// Single-column numeric data, one value per line, with an optional header
/// line "x". Parsing is locale-independent; blank lines are skipped.
/// Throws InvalidArgument on malformed or non-finite entries.
std::vector<double> read_sample_csv(std::istream& in);
std::vector<double> read_sample_csv(const std::filesystem::path& path);

}  // namespace loclace
