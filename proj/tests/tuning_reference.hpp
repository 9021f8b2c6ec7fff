#pragma once

// Published tuning pairs, transcribed row by row: sample size followed by one
// "(a, b)" pair per family column. Parsed here independently of the JSON
// asset the library ships.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace tuning_reference {

inline const std::vector<std::string> kFamilies = {"gaussian", "laplace", "symbeta:2.1", "symbeta:4.5", "logistic"};

inline const char* const kStoneOptimal = R"(
40 & (10, 0.80) & (20, 0.60) & (20, 0.60) & (40, 0.80) & (10, 0.80)
100 & (50, 0.80) & (20, 0.50) & (40, 0.50) & (30, 0.60) & (10, 0.80)
200 & (50, 0.80) & (20, 0.50) & (40, 0.50) & (50, 0.60) & (10, 0.80)
500 & (60, 0.80) & (10, 0.50) & (20, 0.30) & (30, 0.40) & (30, 0.50)
)";

inline const char* const kBeranOptimal = R"(
40 & (10, 1.00) & (40, 0.40) & (10, 0.80) & (40, 1.40) & (10, 1.40)
100 & (10, 1.00) & (40, 0.20) & (10, 0.40) & (40, 1.20) & (20, 1.40)
200 & (10, 1.00) & (40, 0.20) & (40, 0.60) & (40, 1.00) & (25, 1.00)
500 & (10, 0.60) & (40, 0.20) & (40, 0.60) & (35, 0.80) & (30, 1.00)
)";

inline const char* const kStoneNonOptimal = R"(
40 & (30, 0.50) & (50, 0.50) & (40, 0.50) & (50, 0.50) & (50, 0.50)
100 & (30, 0.50) & (50, 0.50) & (50, 0.50) & (50, 0.50) & (50, 0.50)
200 & (30, 0.50) & (50, 0.50) & (50, 0.50) & (50, 0.50) & (50, 0.50)
500 & (30, 0.50) & (50, 0.50) & (40, 0.50) & (50, 0.50) & (50, 0.50)
)";

inline const char* const kBeranNonOptimal = R"(
40 & (40, 0.20) & (10, 0.40) & (40, 0.20) & (30, 0.20) & (40, 0.20)
100 & (40, 0.20) & (10, 1.20) & (40, 0.20) & (35, 0.20) & (40, 0.20)
200 & (40, 0.20) & (10, 1.20) & (40, 0.20) & (40, 0.20) & (40, 0.20)
500 & (40, 0.20) & (10, 1.20) & (40, 0.20) & (40, 0.20) & (40, 0.20)
)";

struct Entry {
    std::string family;
    int n;
    double first;
    double second;
};

inline std::vector<Entry> parse(const char* table) {
    std::vector<Entry> out;
    std::istringstream in(table);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int n = 0;
        int consumed = 0;
        std::sscanf(line.c_str(), "%d%n", &n, &consumed);
        const char* p = line.c_str() + consumed;
        for (const auto& fam : kFamilies) {
            double a = 0.0;
            double b = 0.0;
            int used = 0;
            std::sscanf(p, " & (%lf, %lf)%n", &a, &b, &used);
            p += used;
            out.push_back({fam, n, a, b});
        }
    }
    return out;
}

}  // namespace tuning_reference
