#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "chainfleet/fleetsim/scenario.hpp"
#include "chainfleet/harness/audit.hpp"
#include "chainfleet/harness/runner.hpp"
#include "chainfleet/harness/stats.hpp"

namespace {

using namespace chainfleet;

constexpr const char* kOutDirEnv = "CHAINFLEET_OUT_DIR";

int cmd_run(const std::string& scenario_path, std::string out_dir, std::optional<std::uint64_t> seed,
            std::optional<std::int64_t> duration_ms, bool localization_csv) {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) out_dir = env;
  if (out_dir.empty()) {
    std::cerr << "run: no output directory; pass --out or set " << kOutDirEnv << "\n";
    return 2;
  }
  fleetsim::Scenario scenario;
  try {
    scenario = fleetsim::load_scenario(scenario_path);
    if (seed) scenario.seed = *seed;
    if (duration_ms) scenario.duration = Millis{*duration_ms};
    fleetsim::validate(scenario);
  } catch (const fleetsim::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    const auto outputs = harness::run_and_export(scenario, out_dir, localization_csv);
    for (const auto& f : outputs.files) std::cout << "wrote " << f.string() << "\n";
    std::cout << outputs.audit.to_text();
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_audit(const std::string& blocklog) {
  try {
    const auto report = harness::audit_block_log(blocklog);
    std::cout << report.to_text();
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_stats(const std::string& commits_csv) {
  try {
    std::ifstream in(commits_csv);
    if (!in) throw std::runtime_error("cannot open " + commits_csv);
    const auto commits = harness::read_commits_csv(in);
    harness::write_latency_summary_csv(std::cout, harness::latency_stats(commits));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockchain-coordinated UGV/UAV inventory mission simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> duration_ms;
  bool localization_csv = false;
  auto* run = app.add_subcommand("run", "Simulate a scenario and export CSVs plus the block log");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, std::string("Output directory (") + kOutDirEnv + " overrides)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--duration-ms", duration_ms, "Override the scenario duration");
  run->add_flag("--localization-csv", localization_csv, "Also write localization.csv");

  std::string blocklog;
  auto* audit = app.add_subcommand("audit", "Verify a block log and its sibling commits/inventory CSVs");
  audit->add_option("blocklog", blocklog, "blocklog.hex from a run")->required();

  std::string commits;
  auto* stats = app.add_subcommand("stats", "Per-chaincode commit latency box statistics");
  stats->add_option("commits", commits, "commits.csv from a run")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(scenario_path, out_dir, seed, duration_ms, localization_csv);
  if (*audit) return cmd_audit(blocklog);
  return cmd_stats(commits);
}
