#include "chainfleet/harness/runner.hpp"

#include <fstream>

#include "chainfleet/fleetsim/export.hpp"
#include "chainfleet/fleetsim/simulation.hpp"
#include "chainfleet/harness/stats.hpp"
#include "chainfleet/ledger/block_log.hpp"

namespace chainfleet::harness {

namespace {

template <typename Fn>
std::filesystem::path write_file(const std::filesystem::path& dir, std::string_view name, Fn&& fn) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return path;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw HarnessError(HarnessErrc::InvariantViolation, what);
}

}  // namespace

RunOutputs run_and_export(const fleetsim::Scenario& scenario, const std::filesystem::path& out_dir,
                          bool localization_csv) {
  fleetsim::Simulation sim(scenario);
  sim.run();

  const auto& ledger = sim.ledger();
  const auto commits = ledger.commit_records();
  require(ledger.pending_count() == 0, std::to_string(ledger.pending_count()) + " transactions never committed");
  require(commits.size() == ledger.submitted_count(), "commit records do not cover every submission");

  std::filesystem::create_directories(out_dir);
  RunOutputs outputs;
  outputs.files.push_back(write_file(out_dir, kRunFiles[0], [&](std::ostream& o) {
    fleetsim::write_trajectories_csv(o, sim.trajectory());
  }));
  outputs.files.push_back(write_file(out_dir, kRunFiles[1], [&](std::ostream& o) {
    fleetsim::write_events_csv(o, sim.events());
  }));
  outputs.files.push_back(write_file(out_dir, kRunFiles[2], [&](std::ostream& o) { write_commits_csv(o, commits); }));
  outputs.files.push_back(write_file(out_dir, kRunFiles[3], [&](std::ostream& o) {
    write_latency_summary_csv(o, available_latency_stats(commits));
  }));
  outputs.files.push_back(write_file(out_dir, kRunFiles[4], [&](std::ostream& o) {
    write_inventory_csv(o, ledger.world_states());
  }));
  const auto blocks = ledger.all_blocks();
  outputs.files.push_back(write_file(out_dir, kRunFiles[5], [&](std::ostream& o) {
    ledger::write_block_log(o, blocks);
  }));
  if (localization_csv) {
    outputs.files.push_back(write_file(out_dir, kLocalizationFile, [&](std::ostream& o) {
      fleetsim::write_localization_csv(o, sim.localization_log());
    }));
  }

  outputs.audit = audit_block_log(out_dir / kRunFiles[5]);
  require(outputs.audit.passed(), "self-audit failed\n" + outputs.audit.to_text());
  return outputs;
}

}  // namespace chainfleet::harness
