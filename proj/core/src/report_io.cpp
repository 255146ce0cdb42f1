#include <cmath>
#include <cstdlib>
#include <limits>
#include <fstream>

#include <json.hpp>

#include "tslab/format.hpp"
#include "tslab/lab.hpp"

namespace tslab {

using nlohmann::json;

namespace {

std::string render(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_float(*d);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_float(*d);  // "inf", "nan": JSON has no literal for them
  }
  return std::get<std::string>(c);
}

Cell cell_from(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  throw ValidationError("report cell must be a number or a string");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw ValidationError("row width " + std::to_string(row.size()) + " does not match table \"" +
                          name + "\"");
  }
  for (Cell& c : row) {
    if (auto* d = std::get_if<double>(&c); d && std::isfinite(*d)) {
      *d = std::strtod(format_float(*d).c_str(), nullptr);
    }
  }
  rows.push_back(std::move(row));
}

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ValidationError("format must be csv or json, got \"" + s + "\"");
}

std::string table_csv(const ReportTable& table, const EmitHeader& header) {
  std::string out = "# tslab " + header.version + " config " + header.config_hash + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + render(row[i]);
    out += '\n';
  }
  return out;
}

std::string table_json(const ReportTable& table, const EmitHeader& header) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  const json j = {{"tool", "tslab"},          {"version", header.version},
                  {"configHash", header.config_hash}, {"table", table.name},
                  {"columns", table.columns}, {"rows", rows}};
  return j.dump(2) + "\n";
}

ReportTable table_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("table") || !j.contains("columns") || !j.contains("rows")) {
    throw ValidationError("report JSON needs table, columns and rows");
  }
  ReportTable t;
  t.name = j["table"].get<std::string>();
  t.columns = j["columns"].get<std::vector<std::string>>();
  for (const auto& r : j["rows"]) {
    std::vector<Cell> row;
    for (const auto& c : r) row.push_back(cell_from(c));
    t.add_row(std::move(row));
  }
  return t;
}

std::vector<std::filesystem::path> emit_results(const Report& report, OutputFormat format,
                                                const std::filesystem::path& dir,
                                                const EmitHeader& header) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& t : report.tables) {
    const auto path = dir / (t.name + (format == OutputFormat::Csv ? ".csv" : ".json"));
    write_file(path, format == OutputFormat::Csv ? table_csv(t, header) : table_json(t, header));
    written.push_back(path);
  }
  for (const auto& [name, text] : report.documents) {
    const auto path = dir / (name + ".json");
    write_file(path, text + "\n");
    written.push_back(path);
  }
  return written;
}

std::string to_json(const RunManifest& m) {
  json j = {{"command", m.command},
            {"version", m.version},
            {"configHash", m.config_hash},
            {"config", json::parse(m.config)},
            {"outputs", m.outputs},
            {"wallSeconds", m.wall_seconds},
            {"passed", m.passed},
            {"failures", m.failures}};
  return j.dump(2) + "\n";
}

}  // namespace tslab
