// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <unistd.h>

#include <Eigen/Dense>

#include "chainfleet/chaincode/contracts.hpp"
#include "chainfleet/common/text.hpp"
#include "chainfleet/fleetsim/scenario.hpp"
#include "chainfleet/fleetsim/simulation.hpp"
#include "chainfleet/harness/audit.hpp"
#include "chainfleet/harness/runner.hpp"
#include "chainfleet/harness/stats.hpp"
#include "chainfleet/ledger/block_log.hpp"
#include "chainfleet/ledger/ledger.hpp"
#include "chainfleet/localization/localization.hpp"
#include "multilateration_oracle.hpp"

namespace {

using namespace chainfleet;
using namespace std::chrono_literals;
namespace fs = std::filesystem;
using localization::Vec3;

// Pinned tolerances.
constexpr double kBurstBudgetMs = 1000;          // + validation_budget
constexpr double kQueueFactor = 2;               // max queue <= 2 * batch_size
constexpr double kMinAggregateHz = 200;
constexpr double kIqrRatio = 2;
constexpr int kConvergenceSeeds = 20;
constexpr double kDockDistance = 0.2;            // m
constexpr double kOracleTolerance = 1e-6;        // m
constexpr double kNoiseSigma = 0.1;              // m
constexpr double kRmseBound = 3 * kNoiseSigma;   // m
constexpr double kGdopSlack = 1.15;              // empirical / linearized prediction
constexpr double kPredictedRmse = 0.1756;        // linearized cube GDOP at sigma 0.1, 1000 draws, seed 32
constexpr double kInventoryTolerance = 0.2;      // m
constexpr std::size_t kPlacedObjects = 12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(double v, int digits = 3) { return format_fixed(v, digits); }

// --- 1 ---------------------------------------------------------------------

Outcome block_cutting() {
  ledger::LedgerConfig config;
  config.channels = {"c"};
  ledger::Ledger ledger(config);
  const auto id = ledger.register_identity("Org1", "dashgo", ledger::Role::Robot);
  ledger.create_channel("c", {"Org1"});
  ledger.install_chaincode("c", "kv", std::make_shared<chaincode::AssetContract>(std::vector<std::string>{"k/"}));

  for (int i = 0; i < 10; ++i) {
    ledger.submit(id, "c", "kv", "CreateAsset", {"k/burst" + std::to_string(i), "{}"}, 0ms);
  }
  ledger.submit(id, "c", "kv", "CreateAsset", {"k/lone", "{}"}, 5000ms);
  for (Millis t{0}; t <= 8000ms; t += 1ms) ledger.advance(t);

  const auto records = ledger.commit_records();
  const auto blocks = ledger.blocks("c");
  Millis burst_max{0};
  Millis lone{-1};
  for (const auto& r : records) {
    if (r.submit_time == 0ms) burst_max = std::max(burst_max, r.latency);
    if (r.submit_time == 5000ms) lone = r.latency;
  }
  const double budget = static_cast<double>(config.validation_budget.count());
  const bool one_block = blocks.size() == 3 && blocks[1].txs.size() == 10 && blocks[2].txs.size() == 1;
  const bool burst_ok = static_cast<double>(burst_max.count()) < kBurstBudgetMs + budget;
  const bool lone_ok = lone.count() >= 1000 && static_cast<double>(lone.count()) <= 1000 + budget;
  return {one_block && burst_ok && lone_ok && records.size() == 11,
          "burst of 10 in one block=" + std::string(one_block ? "yes" : "no") + ", burst max latency " +
              std::to_string(burst_max.count()) + " ms, lone latency " + std::to_string(lone.count()) + " ms"};
}

// --- 2 ---------------------------------------------------------------------

Outcome throughput() {
  auto s = fleetsim::default_scenario();
  s.duration = 60000ms;
  s.rates.path_hz = 100;  // 2 x 100 path + 10 battery + detections
  fleetsim::Simulation sim(s);
  sim.run();
  const auto& ledger = sim.ledger();
  const auto records = ledger.commit_records();
  const bool all_valid = std::all_of(records.begin(), records.end(),
                                     [](const ledger::CommitRecord& r) { return r.status == ledger::TxStatus::Valid; });
  const double rate = static_cast<double>(ledger.submitted_count()) / 60.0;
  const auto max_queue = ledger.max_queue_length(s.channel);
  const bool ok = ledger.pending_count() == 0 && records.size() == ledger.submitted_count() && all_valid &&
                  rate >= kMinAggregateHz &&
                  static_cast<double>(max_queue) <= kQueueFactor * static_cast<double>(s.ledger.batch_size);
  return {ok, std::to_string(ledger.submitted_count()) + " tx (" + fmt(rate, 1) + " tx/s), " +
                  std::to_string(records.size()) + " committed, all valid=" + (all_valid ? "yes" : "no") +
                  ", max queue " + std::to_string(max_queue)};
}

// --- shared default-scenario runs --------------------------------------------

struct MissionRun {
  double deck_distance = 0;
  bool docked = false;
  bool switch_after_commit = false;
  bool exclusive = false;
  Millis switch_time{-1};
  Millis commit_time{-1};
};

MissionRun mission(std::uint64_t seed) {
  auto s = fleetsim::default_scenario();
  s.seed = seed;
  fleetsim::Simulation sim(s);
  sim.run();
  MissionRun out;
  out.deck_distance = sim.uav_deck_distance();
  out.docked = sim.docking_status() == chaincode::DockingStatus::Docked;

  const auto& subs = sim.docking_submissions();
  auto docking = subs.find(chaincode::DockingStatus::Docking);
  if (docking != subs.end()) {
    for (const auto& r : sim.ledger().commit_records()) {
      if (r.tx_id == docking->second && r.status == ledger::TxStatus::Valid) out.commit_time = r.commit_time;
    }
  }
  if (sim.mode_switch_time()) out.switch_time = *sim.mode_switch_time();
  out.switch_after_commit = out.commit_time >= 0ms && out.switch_time >= out.commit_time;

  out.exclusive = out.switch_time >= 0ms;
  for (const auto& l : sim.localization_log()) {
    if (l.robot_id != s.uav().id) continue;
    const bool relative_tick = l.t >= out.switch_time && out.switch_time >= 0ms;
    const bool only_mounted = l.global_anchors == 0 && l.mounted_anchors > 0;
    const bool only_global = l.mounted_anchors == 0 && l.global_anchors > 0;
    if (relative_tick ? !only_mounted : !only_global) out.exclusive = false;
  }
  return out;
}

std::vector<MissionRun>& seed_sweep() {
  static std::vector<MissionRun> runs = [] {
    std::vector<MissionRun> r;
    for (int seed = 1; seed <= kConvergenceSeeds; ++seed) r.push_back(mission(static_cast<std::uint64_t>(seed)));
    return r;
  }();
  return runs;
}

// --- 3 ---------------------------------------------------------------------

Outcome latency_shape() {
  fleetsim::Simulation sim(fleetsim::default_scenario());
  sim.run();
  const auto records = sim.ledger().commit_records();
  std::vector<harness::LatencySummary> stats;
  try {
    stats = harness::latency_stats(records);
  } catch (const harness::HarnessError& e) {
    return {false, e.what()};
  }
  double lo = 1e300;
  double hi = 0;
  std::string iqrs;
  for (const auto& s : stats) {
    if (s.chaincode == "battery" || s.chaincode.ends_with("-path")) {
      lo = std::min(lo, s.iqr());
      hi = std::max(hi, s.iqr());
      iqrs += s.chaincode + " IQR " + fmt(s.iqr(), 1) + " ms, ";
    }
  }
  const bool ok = stats.size() == 5 && lo > 0 && hi / lo <= kIqrRatio;
  return {ok, "5 summaries, " + iqrs + "ratio " + fmt(lo > 0 ? hi / lo : 0, 2)};
}

// --- 4, 5 --------------------------------------------------------------------

Outcome convergence() {
  double worst = 0;
  int docked = 0;
  for (const auto& r : seed_sweep()) {
    worst = std::max(worst, r.deck_distance);
    docked += r.docked;
  }
  return {docked == kConvergenceSeeds && worst <= kDockDistance,
          std::to_string(docked) + "/" + std::to_string(kConvergenceSeeds) + " docked, worst UAV-deck distance " +
              fmt(worst) + " m"};
}

Outcome mode_switch() {
  int ordered = 0;
  int exclusive = 0;
  Millis min_gap{1 << 30};
  for (const auto& r : seed_sweep()) {
    ordered += r.switch_after_commit;
    exclusive += r.exclusive;
    if (r.switch_after_commit) min_gap = std::min(min_gap, r.switch_time - r.commit_time);
  }
  return {ordered == kConvergenceSeeds && exclusive == kConvergenceSeeds,
          std::to_string(ordered) + "/" + std::to_string(kConvergenceSeeds) + " switched at or after the commit (min gap " +
              std::to_string(min_gap.count()) + " ms), " + std::to_string(exclusive) + "/" +
              std::to_string(kConvergenceSeeds) + " with exclusive anchor sets"};
}

// --- 6, 7 --------------------------------------------------------------------

std::vector<localization::Anchor> cube() {
  std::vector<localization::Anchor> a;
  const Vec3 corners[] = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  for (int i = 0; i < 4; ++i) {
    a.push_back({"C" + std::to_string(i), corners[i], localization::AnchorSet::Global, true, std::nullopt, Vec3::Zero()});
  }
  return a;
}

Outcome oracle_equivalence() {
  const auto anchors = cube();
  std::vector<Vec3> pts;
  for (const auto& a : anchors) pts.push_back(a.position);
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NormalSampler silent(0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 tag(u(gen), u(gen), u(gen));
    const auto m = localization::measure_ranges(tag, anchors, 0.0, silent);
    std::vector<double> ranges;
    for (const auto& r : m) ranges.push_back(r.measured_distance);
    const Vec3 oracle = chainfleet::testing::grid_oracle(pts, ranges);
    const auto est = localization::multilaterate(m, anchors);
    worst = std::max(worst, (est.position - oracle).norm());
  }
  return {worst <= kOracleTolerance, "100 positions, worst |solver - oracle| " + format_double(worst) + " m"};
}

Outcome noise_rmse() {
  const auto anchors = cube();
  NormalSampler rng(31);
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double se = 0;
  double predicted = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 tag(u(gen), u(gen), u(gen));
    const auto est = localization::multilaterate(localization::measure_ranges(tag, anchors, kNoiseSigma, rng), anchors);
    se += (est.position - tag).squaredNorm();
    Eigen::Matrix<double, 4, 3> J;
    for (int k = 0; k < 4; ++k) J.row(k) = (tag - anchors[k].position).normalized().transpose();
    predicted += kNoiseSigma * kNoiseSigma * (J.transpose() * J).inverse().trace();
  }
  const double rmse = std::sqrt(se / 1000);
  predicted = std::sqrt(predicted / 1000);
  const bool ok = rmse <= kRmseBound && rmse <= kGdopSlack * kPredictedRmse && std::abs(predicted - kPredictedRmse) < 5e-4;
  return {ok, "RMSE " + fmt(rmse, 4) + " m vs bound " + fmt(kRmseBound, 2) + " m and " + fmt(kGdopSlack, 2) +
                  " x GDOP prediction " + fmt(predicted, 4) + " m"};
}

// --- 8 ---------------------------------------------------------------------

Outcome ledger_audit() {
  fleetsim::Simulation sim(fleetsim::default_scenario());
  sim.run();
  const auto blocks = sim.ledger().all_blocks();
  std::stringstream log;
  ledger::write_block_log(log, blocks);
  const auto lines = ledger::read_log_lines(log);
  std::vector<ledger::Block> decoded;
  for (const auto& l : lines) decoded.push_back(ledger::from_log_line(l));
  const auto replayed = ledger::replay(decoded);
  const bool identical = ledger::serialize_states(replayed.states) == ledger::serialize_states(sim.ledger().world_states());

  const auto commits = sim.ledger().commit_records();
  const std::span<const ledger::CommitRecord> commit_view(commits);
  const bool clean = harness::audit_log_lines(lines, commit_view, std::nullopt).passed();

  auto flipped = lines;
  flipped[3][41] = flipped[3][41] == '0' ? '1' : '0';
  const auto flip_report = harness::audit_log_lines(flipped, commit_view, std::nullopt);
  const bool flip_caught = !flip_report.checks[0].passed && flip_report.checks[0].detail.find("block 3") != std::string::npos;

  auto trimmed = decoded;
  const std::string victim = trimmed[3].txs.back().tx_id;
  trimmed[3].txs.pop_back();
  for (std::size_t i = 3; i < trimmed.size(); ++i) {
    if (i > 3) trimmed[i].prev_hash = trimmed[i - 1].hash;
    trimmed[i].hash = ledger::block_hash(trimmed[i]);
  }
  std::vector<std::string> trimmed_lines;
  for (const auto& b : trimmed) trimmed_lines.push_back(ledger::to_log_line(b));
  const auto del_report = harness::audit_log_lines(trimmed_lines, commit_view, std::nullopt);
  const bool delete_caught = !del_report.passed() && del_report.checks[2].detail.find(victim) != std::string::npos;

  return {identical && clean && flip_caught && delete_caught,
          "replay byte-identical=" + std::string(identical ? "yes" : "no") + " (" + std::to_string(blocks.size()) +
              " blocks), clean audit=" + (clean ? "pass" : "fail") + ", byte flip caught=" + (flip_caught ? "yes" : "no") +
              ", tx deletion caught=" + (delete_caught ? "yes" : "no")};
}

// --- 9 ---------------------------------------------------------------------

Outcome inventory() {
  fleetsim::Simulation sim(fleetsim::default_scenario());
  sim.run();
  const auto states = sim.ledger().world_states();
  const auto rows = states.at(sim.scenario().channel).scan(chaincode::kObjectPrefix);
  double worst = 0;
  std::size_t matched = 0;
  for (const auto& placed : sim.scenario().objects) {
    double best = 1e300;
    for (const auto& [key, value] : rows) {
      const auto r = chaincode::Document::parse(value.value).get<chaincode::ObjectRecord>();
      if (r.category == placed.category) best = std::min(best, (Vec3(r.x, r.y, r.z) - placed.position).norm());
    }
    if (best <= kInventoryTolerance) ++matched;
    worst = std::max(worst, best);
  }
  return {rows.size() == kPlacedObjects && matched == kPlacedObjects,
          std::to_string(rows.size()) + " object assets, " + std::to_string(matched) + " within " +
              fmt(kInventoryTolerance, 1) + " m, worst " + fmt(worst) + " m"};
}

// --- 10 --------------------------------------------------------------------

Outcome determinism() {
  const auto base = fs::temp_directory_path() / ("chainfleet_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const auto s = fleetsim::default_scenario();
  harness::run_and_export(s, base / "a");
  harness::run_and_export(s, base / "b");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  };
  std::string detail;
  bool ok = true;
  for (const char* name : {"trajectories.csv", "commits.csv", "blocklog.hex"}) {
    const auto a = slurp(base / "a" / name);
    const bool same = !a.empty() && a == slurp(base / "b" / name);
    ok = ok && same;
    detail += std::string(name) + (same ? " identical (" + std::to_string(a.size()) + " B), " : " DIFFERS, ");
  }
  fs::remove_all(base);
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "block cutting", 1, block_cutting},
      {2, "throughput >= 200 tx/s for 60 s", 30, throughput},
      {3, "latency distribution shape", 0, latency_shape},
      {4, "mission convergence over 20 seeds", 60, convergence},
      {5, "chain-mediated mode switch", 0, mode_switch},
      {6, "multilateration oracle equivalence", 5, oracle_equivalence},
      {7, "multilateration noise behaviour", 10, noise_rmse},
      {8, "ledger audit", 0, ledger_audit},
      {9, "inventory correctness", 0, inventory},
      {10, "determinism", 0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || elapsed < c.budget_s;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << outcome.detail
              << "; " << fmt(elapsed, 2) << " s" << (c.budget_s > 0 ? " (budget " + fmt(c.budget_s, 0) + " s)" : "")
              << (in_time ? "" : " OVER BUDGET") << std::endl;
  }
  std::cout << (failures == 0 ? "all 10 criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
