#include "loclace/data_io.hpp"

#include "loclace/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace loclace {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<double> read_sample_csv(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view field = trim(line);
        if (field.empty()) continue;
        if (!seen_content) {
            seen_content = true;
            if (field == "x") continue;
        }
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
            throw Error(ErrorKind::InvalidArgument,
                        "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a finite number");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<double> read_sample_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
    return read_sample_csv(in);
}

}  // namespace loclace
