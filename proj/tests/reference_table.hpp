#pragma once

// Reference screening counts and scores for five models and two consensus
// variants over 8323 labeled papers.

#include "litsieve/evaluation.hpp"

#include <array>
#include <string>

namespace testing {

struct ReferenceColumn {
    std::string name;
    litsieve::ConfusionMatrix counts;
    double accuracy, precision, recall, f1;
};

inline const std::array<ReferenceColumn, 7>& reference_table() {
    static const std::array<ReferenceColumn, 7> table{{
        {"llama-3-8b", {86, 774, 7461, 2}, 90.68, 10.00, 97.73, 18.14},
        {"llama-3-70b", {85, 194, 8041, 3}, 97.63, 30.47, 96.59, 46.32},
        {"gemini-1.5-flash", {67, 91, 8144, 21}, 98.65, 42.41, 76.14, 54.47},
        {"claude-3.5-sonnet", {76, 95, 8140, 12}, 98.71, 44.44, 86.36, 58.69},
        {"gpt-4o", {80, 50, 8185, 8}, 99.30, 61.54, 90.91, 73.39},
        {"consensus-all", {87, 862, 7373, 1}, 89.63, 9.17, 98.86, 16.78},
        {"consensus-best", {87, 167, 8068, 1}, 97.98, 34.25, 98.86, 50.88},
    }};
    return table;
}

inline constexpr std::int64_t reference_corpus_size = 8323;

}  // namespace testing
