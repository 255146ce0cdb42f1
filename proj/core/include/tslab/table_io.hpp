#pragma once

#include <string>
#include <string_view>

#include "tslab/probability.hpp"

namespace tslab {

// {"axes": [sizes...], "mass": [row-major floats]}
std::string to_json(const ProbabilityTable& table);
ProbabilityTable probability_table_from_json(std::string_view text);

// {"inputs": m, "outputs": k, "prob": [row-major m*k floats]}
std::string to_json(const ConditionalTable& table);
ConditionalTable conditional_table_from_json(std::string_view text);

}  // namespace tslab
