#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tslab/aux_optimizer.hpp"
#include "tslab/errors.hpp"
#include "tslab/probability.hpp"
#include "tslab/two_terminal.hpp"

namespace tslab {

const char* version();

inline constexpr const char* kConfigSchema = "tslab/config/v1";

// --- configuration -----------------------------------------------------------------

struct LabConfig {
  std::uint64_t seed = 0;
  ProbabilityTable source;
  std::optional<DistortionCriterion> distortion;
  std::string problem;  // empty when the command does not need one
  std::size_t order = 1;
  AuxSpec aux;          // cardinalities resolved against the source at parse time
  std::vector<double> targets;
  std::optional<ConditionalTable> aux1;
  std::optional<ConditionalTable> aux2;
  std::vector<std::uint32_t> psi;  // row-major |Z1| x |Z2|
  std::vector<std::size_t> schedule;
  SchemeEpsilons epsilons;
  std::size_t trials = 1000;
  double lambda = 1.0;
  std::size_t super_blocks = kDefaultSuperBlocks;
  std::string suite;
  std::size_t models = 100;
  std::string output = "out";

  bool operator==(const LabConfig&) const = default;
};

// Collects every field-level problem found while parsing.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

LabConfig parse_config(std::string_view text);

// Canonical JSON with every parameter spelled out; parse_config inverts it.
std::string serialize_config(const LabConfig& config);

// FNV-1a 64 over the canonical form without the output path, as 16 hex digits.
std::string config_hash(const LabConfig& config);

// --- reports ------------------------------------------------------------------------

using Cell = std::variant<std::int64_t, double, std::string>;

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Doubles are rounded to 9 significant digits on entry, so CSV and JSON
  // renderings carry the same value.
  void add_row(std::vector<Cell> row);
  bool operator==(const ReportTable&) const = default;
};

struct Report {
  std::string command;
  std::vector<ReportTable> tables;
  std::vector<std::pair<std::string, std::string>> documents;  // name, JSON text
  bool operator==(const Report&) const = default;
};

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& s);

struct EmitHeader {
  std::string version;
  std::string config_hash;
};

std::string table_csv(const ReportTable& table, const EmitHeader& header);
std::string table_json(const ReportTable& table, const EmitHeader& header);
ReportTable table_from_json(std::string_view text);

// One file per table, `<dir>/<name>.csv|json`, plus `<dir>/<name>.json` per
// document; returns the paths written.
std::vector<std::filesystem::path> emit_results(const Report& report, OutputFormat format,
                                                const std::filesystem::path& dir,
                                                const EmitHeader& header);

// --- runs ----------------------------------------------------------------------------

enum class Command { Info, Region, Simulate, Verify };
const char* to_string(Command c);
Command command_from_string(const std::string& s);

struct RunManifest {
  std::string command;
  std::string version;
  std::string config_hash;
  std::string config;  // canonical config echo
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  bool passed = true;  // verify suites only
  std::vector<std::string> failures;
};

std::string to_json(const RunManifest& manifest);

// Computes the report without touching the file system.
Report compute(Command command, const LabConfig& config, std::vector<std::string>* failures);

// Writes the report tables and manifest.json under `out`. A failed verify
// suite throws AssertionFailure after the artifacts are written.
RunManifest run(Command command, const LabConfig& config, const std::filesystem::path& out,
                OutputFormat format);

}  // namespace tslab
