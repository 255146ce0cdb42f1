// tslab: config-driven front end.
//
// Exit codes: 0 success, 1 other failure (I/O, internal), 2 invalid input,
// 3 a verify suite found a failing property, 4 a size budget was refused.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tslab/lab.hpp"
#include "tslab/parallel.hpp"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitBudget = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tslab::ValidationError("cannot read config " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tslab: two-terminal source coding lab"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(tslab::version()));

  std::string config_path, out_dir, format = "csv", problem, suite;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default: config output)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  for (const char* name : {"info", "region", "simulate", "verify"}) app.add_subcommand(name);
  app.get_subcommand("region")->add_option("--problem", problem, "overrides the config problem");
  app.get_subcommand("simulate")->add_option("--problem", problem, "overrides the config problem");
  app.get_subcommand("verify")
      ->add_option("--suite", suite, "typicality | identities | containment | coding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const auto command = tslab::command_from_string(app.get_subcommands().front()->get_name());
    tslab::LabConfig config = tslab::parse_config(read_file(config_path));
    if (*seed_opt) config.seed = seed;
    if (!problem.empty()) config.problem = problem;
    if (!suite.empty()) config.suite = suite;
    if (*out_opt) config.output = out_dir;
    tslab::set_worker_count(threads);
    const auto manifest =
        tslab::run(command, config, config.output, tslab::output_format_from_string(format));
    std::cout << manifest.command << ": wrote " << manifest.outputs.size() << " file(s) to "
              << config.output << " (config " << manifest.config_hash << ")\n";
    return 0;
  } catch (const tslab::AssertionFailure& e) {
    std::cerr << "assertion: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const tslab::BudgetError& e) {
    std::cerr << "budget: " << e.what() << " (needs 2^" << e.required_log2() << ")\n";
    return kExitBudget;
  } catch (const tslab::ValidationError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}
