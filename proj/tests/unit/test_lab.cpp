#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tslab/lab.hpp"

using namespace tslab;
namespace fs = std::filesystem;

namespace {

const char* kDsbsConfig = R"({
  "$schema": "tslab/config/v1",
  "seed": 7,
  "source": {"axes": [2, 2], "mass": [0.375, 0.125, 0.125, 0.375]},
  "distortion": {"matrix": [[0, 1], [1, 0]]},
  "problem": "wynerZiv",
  "targets": [0.1, 0.2],
  "output": "out/wz"
})";

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string joined(const ConfigError& e) {
  std::string s;
  for (const auto& m : e.errors()) s += m + "\n";
  return s;
}

// Parses `text`, expecting a ConfigError; returns its messages.
std::string config_errors(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return joined(e);
  }
  FAIL("config was accepted");
  return {};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("tslab_test_lab_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round trip is exact") {
  const LabConfig c = parse_config(kDsbsConfig);
  CHECK(c.seed == 7);
  CHECK(c.problem == "wynerZiv");
  const std::string canon = serialize_config(c);
  const LabConfig back = parse_config(canon);
  CHECK(back == c);
  CHECK(serialize_config(back) == canon);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  // The output path does not enter the hash; the seed does.
  LabConfig moved = c;
  moved.output = "elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  moved.seed = 8;
  CHECK(config_hash(moved) != config_hash(c));
}

TEST_CASE("config errors name the offending field") {
  auto j = nlohmann::json::parse(kDsbsConfig);

  SUBCASE("mass off by 0.02") {
    j["source"]["mass"] = {0.375, 0.125, 0.125, 0.355};
    const std::string e = config_errors(j.dump());
    CHECK(e.find("source") != std::string::npos);
    CHECK(e.find("0.02") != std::string::npos);
  }
  SUBCASE("unknown key") {
    j["epsilon2"] = 0.1;
    const std::string e = config_errors(j.dump());
    CHECK(e.find("unknown field") != std::string::npos);
    CHECK(e.find("epsilon2") != std::string::npos);
  }
  SUBCASE("missing seed") {
    j.erase("seed");
    CHECK(config_errors(j.dump()).find("seed") != std::string::npos);
  }
  SUBCASE("every problem is reported at once") {
    j.erase("seed");
    j["epsilon2"] = 0.1;
    try {
      parse_config(j.dump());
      FAIL("config was accepted");
    } catch (const ConfigError& e) {
      CHECK(e.errors().size() >= 2);
    }
  }
  SUBCASE("not json") {
    CHECK_THROWS_AS(parse_config("{\"seed\": "), ValidationError);
  }
}

TEST_CASE("report tables") {
  const EmitHeader h{"1.0.0", "0123456789abcdef"};

  SUBCASE("empty table renders header only") {
    const ReportTable t{"region", {"problem", "order", "r1", "r2", "d", "witnessId"}, {}};
    const std::string csv = table_csv(t, h);
    CHECK(csv == "# tslab 1.0.0 config 0123456789abcdef\nproblem,order,r1,r2,d,witnessId\n");
    CHECK(table_from_json(table_json(t, h)) == t);
  }
  SUBCASE("three rows round trip through json") {
    ReportTable t{"simulate", {"nPrime", "rate", "label"}, {}};
    t.add_row({std::int64_t{8}, 0.1234567891234, std::string("a")});
    t.add_row({std::int64_t{12}, 1.0 / 3.0, std::string("b,c")});
    t.add_row({std::int64_t{16}, 0.0, std::string("")});
    CHECK(std::get<double>(t.rows[1][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(table_from_json(table_json(t, h)) == t);

    std::istringstream csv(table_csv(t, h));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 5);
  }
  SUBCASE("emit writes one file per table") {
    const fs::path dir = scratch("emit");
    Report r{"region", {ReportTable{"a", {"x"}, {}}, ReportTable{"b", {"y"}, {}}}, {}};
    r.documents.emplace_back("doc", "{}");
    const auto files = emit_results(r, OutputFormat::Csv, dir, h);
    CHECK(files.size() == 3);
    CHECK(fs::exists(dir / "a.csv"));
    CHECK(fs::exists(dir / "b.csv"));
    CHECK(fs::exists(dir / "doc.json"));
  }
}

TEST_CASE("compute") {
  SUBCASE("binary rate-distortion curve") {
    LabConfig c = parse_config(R"({
      "$schema": "tslab/config/v1",
      "seed": 1,
      "source": {"axes": [2], "mass": [0.5, 0.5]},
      "distortion": {"matrix": [[0, 1], [1, 0]]},
      "problem": "shannon",
      "targets": [0, 0.1, 0.25, 0.5]
    })");
    const Report r = compute(Command::Region, c, nullptr);
    const ReportTable* curve = nullptr;
    for (const auto& t : r.tables)
      if (t.name == "curve") curve = &t;
    REQUIRE(curve != nullptr);
    REQUIRE(curve->rows.size() == 4);
    const double expected[] = {1.0, 0.531, 0.189, 0.0};
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(std::get<double>(curve->rows[i][3]) - expected[i]) <= 1e-3);
  }
  SUBCASE("identities suite passes on random models") {
    LabConfig c = parse_config(R"({
      "$schema": "tslab/config/v1",
      "seed": 11,
      "source": {"axes": [2, 2], "mass": [0.45, 0.05, 0.05, 0.45]},
      "suite": "identities",
      "models": 100
    })");
    std::vector<std::string> failures;
    compute(Command::Verify, c, &failures);
    CHECK(failures.empty());
  }
  SUBCASE("three-entry schedule gives three rows") {
    LabConfig c = parse_config(R"({
      "$schema": "tslab/config/v1",
      "seed": 2,
      "source": {"axes": [2], "mass": [0.5, 0.5]},
      "channels": {"aux1": {"inputs": 2, "outputs": 2, "prob": [0.75, 0.25, 0.25, 0.75]}},
      "problem": "point",
      "schedule": [8, 12, 16],
      "epsilons": {"epsilon": 0.4, "epsilon1": 0.2},
      "trials": 200
    })");
    const Report r = compute(Command::Simulate, c, nullptr);
    REQUIRE(r.tables.size() >= 1);
    CHECK(r.tables[0].rows.size() == 3);
  }
  SUBCASE("same config, same bytes") {
    const LabConfig c = parse_config(kDsbsConfig);
    const EmitHeader h{version(), config_hash(c)};
    const Report a = compute(Command::Region, c, nullptr);
    const Report b = compute(Command::Region, c, nullptr);
    CHECK(a == b);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i)
      CHECK(table_csv(a.tables[i], h) == table_csv(b.tables[i], h));
  }
}

#if defined(TSLAB_CLI_PATH) && defined(TSLAB_CONFIG_DIR)

namespace {

int cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + TSLAB_CLI_PATH + "\" " + args + " --out \"" +
                          out.string() + "\" > \"" + (out / "stdout.txt").string() + "\" 2>&1";
  fs::create_directories(out);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string patched(const std::string& config, const std::string& from, const std::string& to) {
  std::string text = read_all(fs::path(TSLAB_CONFIG_DIR) / config);
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli");
  const std::string configs = TSLAB_CONFIG_DIR;

  CHECK(cli("region --config \"" + configs + "/shannon.json\"", dir / "ok") == 0);
  CHECK(fs::exists(dir / "ok" / "curve.csv"));
  CHECK(fs::exists(dir / "ok" / "manifest.json"));

  CHECK(cli("verify --config \"" + configs + "/identities.json\"", dir / "ident") == 0);

  const auto bad = write_config(dir, "bad.json", patched("shannon.json", "\"seed\"", "\"epsilon2\": 1, \"seed\""));
  CHECK(cli("region --config \"" + bad.string() + "\"", dir / "bad") == 2);
  CHECK(cli("region --config \"" + (dir / "missing.json").string() + "\"", dir / "miss") == 2);

  const auto weak = write_config(dir, "weak.json", patched("typicality.json", "\"epsilon\": 0.4", "\"epsilon\": 0.02"));
  CHECK(cli("verify --config \"" + weak.string() + "\"", dir / "weak") == 3);
  CHECK(fs::exists(dir / "weak" / "verify.csv"));

  const auto deep = write_config(dir, "deep.json", patched("wyner_ziv.json", "\"order\": 1", "\"order\": 3"));
  CHECK(cli("region --config \"" + deep.string() + "\"", dir / "deep") == 4);
}

TEST_CASE("cli output is reproducible") {
  const fs::path dir = scratch("repro");
  const std::string cfg = std::string(TSLAB_CONFIG_DIR) + "/wyner_ziv.json";
  REQUIRE(cli("region --config \"" + cfg + "\"", dir / "a") == 0);
  REQUIRE(cli("region --config \"" + cfg + "\"", dir / "b") == 0);
  for (const char* f : {"region.csv", "corners.csv", "curve.csv", "witnesses.json"})
    CHECK(read_all(dir / "a" / f) == read_all(dir / "b" / f));
}

#endif
