#pragma once

// Internal: JSON <-> table conversion shared by table_io, config and report_io.

#include <string>

#include <json.hpp>

#include "tslab/probability.hpp"

namespace tslab::detail {

using nlohmann::json;

ProbabilityTable probability_table_from(const json& j, const std::string& name);
json probability_table_to(const ProbabilityTable& table);

ConditionalTable conditional_table_from(const json& j, const std::string& name);
json conditional_table_to(const ConditionalTable& table);

// Rejects keys outside `allowed`, naming the offending field.
void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where);

}  // namespace tslab::detail
