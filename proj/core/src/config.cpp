#include <cstdio>
#include <functional>

#include "json_tables.hpp"
#include "tslab/lab.hpp"

namespace tslab {

using detail::json;

ConfigError::ConfigError(std::vector<std::string> errors)
    : ValidationError([&] {
        std::string all = "invalid config:";
        for (const auto& e : errors) all += "\n  " + e;
        return all;
      }()),
      errors_(std::move(errors)) {}

namespace {

constexpr const char* kTopLevel[] = {
    "$schema", "seed",     "source",   "distortion", "problem",     "order", "aux",
    "targets", "channels", "psi",      "schedule",   "epsilons",    "trials", "lambda",
    "superBlocks", "suite", "models", "output"};

std::uint64_t as_seed(const json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ValidationError("seed must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::size_t as_count(const json& j, const std::string& name, std::size_t min) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min)) {
    throw ValidationError(name + " must be an integer >= " + std::to_string(min));
  }
  return j.get<std::size_t>();
}

double as_real(const json& j, const std::string& name) {
  if (!j.is_number()) throw ValidationError(name + " must be a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& name) {
  if (!j.is_string()) throw ValidationError(name + " must be a string");
  return j.get<std::string>();
}

DistortionCriterion distortion_from(const json& j) {
  detail::reject_unknown_fields(j, {"matrix", "dMax"}, "distortion");
  if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].empty()) {
    throw ValidationError("distortion.matrix must be a nonempty array of rows");
  }
  DistortionCriterion d;
  d.targets = j["matrix"].size();
  d.estimates = 0;
  for (const auto& row : j["matrix"]) {
    if (!row.is_array() || row.empty()) throw ValidationError("distortion.matrix rows must be arrays");
    if (d.estimates == 0) d.estimates = row.size();
    if (row.size() != d.estimates) throw ValidationError("distortion.matrix rows differ in length");
    for (const auto& v : row) d.d.push_back(as_real(v, "distortion.matrix[][]"));
  }
  d.d_max = 0.0;
  for (double v : d.d) d.d_max = std::max(d.d_max, v);
  if (j.contains("dMax")) d.d_max = as_real(j["dMax"], "distortion.dMax");
  try {
    d.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("distortion: ") + e.what());
  }
  return d;
}

json distortion_to(const DistortionCriterion& d) {
  json rows = json::array();
  for (std::size_t t = 0; t < d.targets; ++t) {
    json row = json::array();
    for (std::size_t e = 0; e < d.estimates; ++e) row.push_back(d(t, e));
    rows.push_back(row);
  }
  return {{"matrix", rows}, {"dMax", d.d_max}};
}

}  // namespace

LabConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

  std::vector<std::string> errors;
  auto field = [&](const char* key, const std::function<void(const json&)>& fn) {
    if (!j.contains(key)) return;
    try {
      fn(j[key]);
    } catch (const ValidationError& e) {
      errors.emplace_back(e.what());
    } catch (const json::exception& e) {
      errors.emplace_back(std::string(key) + ": " + e.what());
    }
  };

  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kTopLevel) known = known || key == k;
    if (!known) errors.push_back("unknown field \"" + key + "\"");
  }
  if (!j.contains("$schema")) {
    errors.push_back("$schema is required (\"" + std::string(kConfigSchema) + "\")");
  } else if (!j["$schema"].is_string() || j["$schema"].get<std::string>() != kConfigSchema) {
    errors.push_back("$schema must be \"" + std::string(kConfigSchema) + "\"");
  }
  if (!j.contains("seed")) errors.push_back("seed is required");
  if (!j.contains("source")) errors.push_back("source is required");

  LabConfig c;
  bool card1_given = false, card2_given = false;
  field("seed", [&](const json& v) { c.seed = as_seed(v); });
  field("source", [&](const json& v) { c.source = detail::probability_table_from(v, "source"); });
  field("distortion", [&](const json& v) { c.distortion = distortion_from(v); });
  field("problem", [&](const json& v) { c.problem = as_string(v, "problem"); });
  field("order", [&](const json& v) { c.order = as_count(v, "order", 1); });
  field("aux", [&](const json& v) {
    detail::reject_unknown_fields(
        v, {"cardZ1", "cardZ2", "gridStep", "restarts", "maxIterations", "tolerance"}, "aux");
    if (v.contains("cardZ1")) {
      c.aux.card_z1 = as_count(v["cardZ1"], "aux.cardZ1", 1);
      card1_given = true;
    }
    if (v.contains("cardZ2")) {
      c.aux.card_z2 = as_count(v["cardZ2"], "aux.cardZ2", 1);
      card2_given = true;
    }
    if (v.contains("gridStep")) c.aux.grid_step = as_real(v["gridStep"], "aux.gridStep");
    if (v.contains("restarts")) c.aux.restarts = as_count(v["restarts"], "aux.restarts", 1);
    if (v.contains("maxIterations")) {
      c.aux.max_iterations = as_count(v["maxIterations"], "aux.maxIterations", 1);
    }
    if (v.contains("tolerance")) c.aux.tolerance = as_real(v["tolerance"], "aux.tolerance");
    c.aux.validate();
  });
  field("targets", [&](const json& v) {
    if (!v.is_array()) throw ValidationError("targets must be an array");
    for (const auto& t : v) {
      const double d = as_real(t, "targets[]");
      if (!(d >= 0.0)) throw ValidationError("targets must be >= 0");
      c.targets.push_back(d);
    }
  });
  field("channels", [&](const json& v) {
    detail::reject_unknown_fields(v, {"aux1", "aux2"}, "channels");
    if (v.contains("aux1")) c.aux1 = detail::conditional_table_from(v["aux1"], "channels.aux1");
    if (v.contains("aux2")) c.aux2 = detail::conditional_table_from(v["aux2"], "channels.aux2");
  });
  field("psi", [&](const json& v) {
    if (!v.is_array()) throw ValidationError("psi must be an array");
    for (const auto& t : v) c.psi.push_back(static_cast<std::uint32_t>(as_count(t, "psi[]", 0)));
  });
  field("schedule", [&](const json& v) {
    if (!v.is_array()) throw ValidationError("schedule must be an array");
    for (const auto& t : v) c.schedule.push_back(as_count(t, "schedule[]", 1));
  });
  field("epsilons", [&](const json& v) {
    detail::reject_unknown_fields(v, {"epsilon", "epsilon1", "epsilon4"}, "epsilons");
    if (v.contains("epsilon")) c.epsilons.epsilon = as_real(v["epsilon"], "epsilons.epsilon");
    if (v.contains("epsilon1")) c.epsilons.epsilon1 = as_real(v["epsilon1"], "epsilons.epsilon1");
    if (v.contains("epsilon4")) c.epsilons.epsilon4 = as_real(v["epsilon4"], "epsilons.epsilon4");
    c.epsilons = c.epsilons.resolved();
  });
  field("trials", [&](const json& v) { c.trials = as_count(v, "trials", 1); });
  field("lambda", [&](const json& v) {
    c.lambda = as_real(v, "lambda");
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
  });
  field("superBlocks", [&](const json& v) { c.super_blocks = as_count(v, "superBlocks", 1); });
  field("suite", [&](const json& v) { c.suite = as_string(v, "suite"); });
  field("models", [&](const json& v) { c.models = as_count(v, "models", 1); });
  field("output", [&](const json& v) { c.output = as_string(v, "output"); });
  if (!j.contains("epsilons")) c.epsilons = c.epsilons.resolved();

  // Cross-field checks once the pieces parsed.
  if (errors.empty()) {
    const auto& axes = c.source.axes();
    if (c.source.rank() > 2) errors.push_back("source must have one or two axes");
    auto block = [&](std::size_t a) -> std::size_t {
      double cells = 1.0;
      for (std::size_t i = 0; i < c.order; ++i) cells *= static_cast<double>(a);
      if (cells > 1e6) return 0;
      return static_cast<std::size_t>(cells);
    };
    if (errors.empty()) {
      const std::size_t b1 = block(axes[0]);
      const std::size_t b2 = block(c.source.rank() == 2 ? axes[1] : 1);
      if (b1 == 0 || b2 == 0) {
        errors.push_back("order " + std::to_string(c.order) + " makes the block alphabet too large");
      } else {
        if (!card1_given) c.aux.card_z1 = c.aux.resolved_card1(b1);
        if (!card2_given) c.aux.card_z2 = c.aux.resolved_card2(b2);
        if (c.aux1 && c.aux1->inputs() != b1) {
          errors.push_back("channels.aux1 has " + std::to_string(c.aux1->inputs()) +
                           " inputs; the X1 block alphabet has " + std::to_string(b1));
        }
        if (c.aux2 && c.aux2->inputs() != b2) {
          errors.push_back("channels.aux2 has " + std::to_string(c.aux2->inputs()) +
                           " inputs; the X2 block alphabet has " + std::to_string(b2));
        }
        if (c.aux1 && c.aux2 && !c.psi.empty() &&
            c.psi.size() != c.aux1->outputs() * c.aux2->outputs()) {
          errors.push_back("psi needs |Z1| x |Z2| = " +
                           std::to_string(c.aux1->outputs() * c.aux2->outputs()) + " entries");
        }
      }
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

namespace {

json config_json(const LabConfig& c, bool with_output) {
  json j;
  j["$schema"] = kConfigSchema;
  j["seed"] = c.seed;
  j["source"] = detail::probability_table_to(c.source);
  if (c.distortion) j["distortion"] = distortion_to(*c.distortion);
  j["problem"] = c.problem;
  j["order"] = c.order;
  j["aux"] = {{"cardZ1", c.aux.card_z1},     {"cardZ2", c.aux.card_z2},
              {"gridStep", c.aux.grid_step}, {"restarts", c.aux.restarts},
              {"maxIterations", c.aux.max_iterations}, {"tolerance", c.aux.tolerance}};
  j["targets"] = c.targets;
  if (c.aux1 || c.aux2) {
    json ch = json::object();
    if (c.aux1) ch["aux1"] = detail::conditional_table_to(*c.aux1);
    if (c.aux2) ch["aux2"] = detail::conditional_table_to(*c.aux2);
    j["channels"] = ch;
  }
  j["psi"] = c.psi;
  j["schedule"] = c.schedule;
  j["epsilons"] = {{"epsilon", c.epsilons.epsilon},
                   {"epsilon1", c.epsilons.epsilon1},
                   {"epsilon4", c.epsilons.epsilon4}};
  j["trials"] = c.trials;
  j["lambda"] = c.lambda;
  j["superBlocks"] = c.super_blocks;
  j["suite"] = c.suite;
  j["models"] = c.models;
  if (with_output) j["output"] = c.output;
  return j;
}

}  // namespace

std::string serialize_config(const LabConfig& config) { return config_json(config, true).dump(2); }

std::string config_hash(const LabConfig& config) {
  const std::string text = config_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tslab
