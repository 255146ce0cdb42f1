#include "tslab/table_io.hpp"

#include <algorithm>

#include "json_tables.hpp"
#include "tslab/errors.hpp"

namespace tslab {

namespace detail {

namespace {

std::vector<double> float_array(const json& j, const std::string& name) {
  if (!j.is_array()) throw ValidationError(name + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(name + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t positive_size(const json& j, const std::string& name) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ValidationError(name + " must be a positive integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ValidationError(where + ": unknown field \"" + key + "\"");
  }
}

ProbabilityTable probability_table_from(const json& j, const std::string& name) {
  reject_unknown_fields(j, {"axes", "mass"}, name);
  if (!j.contains("axes") || !j.contains("mass")) {
    throw ValidationError(name + ": requires \"axes\" and \"mass\"");
  }
  if (!j["axes"].is_array() || j["axes"].empty()) {
    throw ValidationError(name + ".axes must be a nonempty array");
  }
  std::vector<std::size_t> axes;
  for (const auto& a : j["axes"]) axes.push_back(positive_size(a, name + ".axes[]"));
  try {
    return ProbabilityTable(std::move(axes), float_array(j["mass"], name + ".mass"));
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.what());
  }
}

json probability_table_to(const ProbabilityTable& table) {
  json j;
  j["axes"] = table.axes();
  j["mass"] = std::vector<double>(table.mass().begin(), table.mass().end());
  return j;
}

ConditionalTable conditional_table_from(const json& j, const std::string& name) {
  reject_unknown_fields(j, {"inputs", "outputs", "prob"}, name);
  if (!j.contains("inputs") || !j.contains("outputs") || !j.contains("prob")) {
    throw ValidationError(name + ": requires \"inputs\", \"outputs\" and \"prob\"");
  }
  try {
    return ConditionalTable(positive_size(j["inputs"], name + ".inputs"),
                            positive_size(j["outputs"], name + ".outputs"),
                            float_array(j["prob"], name + ".prob"));
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.what());
  }
}

json conditional_table_to(const ConditionalTable& table) {
  json j;
  j["inputs"] = table.inputs();
  j["outputs"] = table.outputs();
  j["prob"] = std::vector<double>(table.data().begin(), table.data().end());
  return j;
}

}  // namespace detail

namespace {

detail::json parse_or_throw(std::string_view text) {
  try {
    return detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string to_json(const ProbabilityTable& table) {
  return detail::probability_table_to(table).dump();
}

ProbabilityTable probability_table_from_json(std::string_view text) {
  return detail::probability_table_from(parse_or_throw(text), "table");
}

std::string to_json(const ConditionalTable& table) {
  return detail::conditional_table_to(table).dump();
}

ConditionalTable conditional_table_from_json(std::string_view text) {
  return detail::conditional_table_from(parse_or_throw(text), "conditional");
}

}  // namespace tslab
