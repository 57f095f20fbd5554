#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "chainfleet/fleetsim/scenario.hpp"
#include "chainfleet/fleetsim/simulation.hpp"
#include "chainfleet/harness/audit.hpp"
#include "chainfleet/harness/runner.hpp"
#include "chainfleet/harness/stats.hpp"
#include "chainfleet/ledger/block_log.hpp"

namespace chainfleet::harness {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

ledger::CommitRecord commit(std::string chaincode, std::int64_t latency, std::string id = "") {
  return {id.empty() ? chaincode + std::to_string(latency) : id, std::move(chaincode), Millis{100},
          Millis{100 + latency}, Millis{latency}, ledger::TxStatus::Valid};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("chainfleet_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Stats, IntegerQuartiles) {
  const auto s = summarize("battery", {5, 1, 4, 2, 3});
  EXPECT_EQ(s.n, 5u);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.q1, 2);
  EXPECT_EQ(s.median, 3);
  EXPECT_EQ(s.q3, 4);
  EXPECT_EQ(s.max, 5);
  EXPECT_TRUE(s.outliers.empty());
}

TEST(Stats, InterpolatesBetweenOrderStatistics) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
}

// Box geometry of the battery chaincode plot: median 0.25985 ms, box 0.21455 to 0.41655 ms,
// whiskers 0.056 to 0.7096 ms. Thirteen points place those values on order statistics 3, 6, 9
// under type-7 interpolation; 1.0773 sits beyond q3 + 1.5 IQR = 0.71955.
TEST(Stats, BatteryBoxShapeIsEchoed) {
  std::vector<double> v{0.056, 0.1, 0.15, 0.21455, 0.22, 0.24, 0.25985, 0.3, 0.35, 0.41655, 0.6, 0.7096, 1.0773};
  const auto s = summarize("battery", v);
  EXPECT_DOUBLE_EQ(s.q1, 0.21455);
  EXPECT_DOUBLE_EQ(s.median, 0.25985);
  EXPECT_DOUBLE_EQ(s.q3, 0.41655);
  ASSERT_EQ(s.outliers.size(), 1u);
  EXPECT_DOUBLE_EQ(s.outliers[0], 1.0773);
  EXPECT_LE(s.q1, s.median);
  EXPECT_LE(s.median, s.q3);
}

TEST(Stats, AllFiveRequired) {
  std::vector<ledger::CommitRecord> rows;
  for (auto name : kChaincodes) rows.push_back(commit(std::string(name), 3));
  EXPECT_EQ(latency_stats(rows).size(), 5u);

  rows.pop_back();
  try {
    latency_stats(rows);
    FAIL();
  } catch (const HarnessError& e) {
    EXPECT_EQ(e.code(), HarnessErrc::MissingChaincode);
    EXPECT_NE(std::string(e.what()).find("dashgo-objects"), std::string::npos);
  }
  EXPECT_EQ(available_latency_stats(rows).size(), 4u);
}

TEST(Stats, InvalidatedCommitsAreExcluded) {
  std::vector<ledger::CommitRecord> rows;
  for (auto name : kChaincodes) rows.push_back(commit(std::string(name), 3));
  auto bad = commit("battery", 900);
  bad.status = ledger::TxStatus::Invalidated;
  rows.push_back(bad);
  EXPECT_EQ(latency_stats(rows)[0].max, 3);
}

TEST(CommitsCsv, RoundTripAndRejects) {
  std::vector<ledger::CommitRecord> rows{commit("battery", 7, "aa"), commit("tello-path", 0, "bb")};
  rows[1].status = ledger::TxStatus::Invalidated;
  std::stringstream buf;
  write_commits_csv(buf, rows);
  EXPECT_EQ(read_commits_csv(buf), rows);

  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_commits_csv(in);
    } catch (const HarnessError& e) {
      return e.code() == HarnessErrc::MalformedCsv;
    }
    return false;
  };
  const std::string header = "tx_id,chaincode,submit_ms,commit_ms,latency_ms,status\n";
  EXPECT_TRUE(reject(""));
  EXPECT_TRUE(reject("id,cc\n"));
  EXPECT_TRUE(reject(header + "a,battery,1,2,1\n"));
  EXPECT_TRUE(reject(header + "a,battery,1,x,1,valid\n"));
  EXPECT_TRUE(reject(header + "a,battery,1,5,3,valid\n"));
  EXPECT_TRUE(reject(header + "a,battery,1,2,1,maybe\n"));
}

class AuditFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    auto s = fleetsim::default_scenario();
    s.duration = 3000ms;
    fleetsim::Simulation sim(s);
    sim.run();
    blocks_ = sim.ledger().all_blocks();
    for (const auto& b : blocks_) lines_.push_back(ledger::to_log_line(b));
    commits_ = sim.ledger().commit_records();
    std::ostringstream inv;
    write_inventory_csv(inv, sim.ledger().world_states());
    inventory_ = inv.str();
    ASSERT_GT(blocks_.size(), 5u);
  }

  AuditReport audit(const std::vector<std::string>& lines) {
    return audit_log_lines(lines, std::span<const ledger::CommitRecord>(commits_), inventory_);
  }

  static const AuditCheck& check(const AuditReport& r, const std::string& name) {
    for (const auto& c : r.checks) {
      if (c.name == name) return c;
    }
    throw std::logic_error("no check " + name);
  }

  std::vector<ledger::Block> blocks_;
  std::vector<std::string> lines_;
  std::vector<ledger::CommitRecord> commits_;
  std::string inventory_;
};

TEST_F(AuditFixture, CleanLogPasses) {
  const auto r = audit(lines_);
  EXPECT_TRUE(r.passed()) << r.to_text();
  EXPECT_EQ(r.checks.size(), 3u);
}

TEST_F(AuditFixture, EverySingleByteFlipInBlockThreeIsCaught) {
  const std::string original = lines_[3];
  for (std::size_t pos = 0; pos < original.size(); pos += 2) {
    auto mutated = lines_;
    auto& c = mutated[3][pos + 1];
    c = c == '0' ? '1' : '0';  // flips bits of one byte, stays valid hex
    const auto r = audit(mutated);
    const auto& chain = check(r, "hash_chain");
    ASSERT_FALSE(chain.passed) << "byte " << pos / 2;
    ASSERT_NE(chain.detail.find("block 3"), std::string::npos) << chain.detail;
  }
}

TEST_F(AuditFixture, NonHexCorruptionNamesTheBlock) {
  auto mutated = lines_;
  mutated[3][10] = 'z';
  const auto& chain = check(audit(mutated), "hash_chain");
  EXPECT_FALSE(chain.passed);
  EXPECT_NE(chain.detail.find("block 3"), std::string::npos);
}

TEST_F(AuditFixture, DeletedTransactionIsNamedEvenWhenHashesAreRebuilt) {
  auto blocks = blocks_;
  ASSERT_GE(blocks[3].txs.size(), 2u);
  const std::string victim = blocks[3].txs[1].tx_id;
  blocks[3].txs.erase(blocks[3].txs.begin() + 1);
  for (std::size_t i = 3; i < blocks.size(); ++i) {
    if (i > 3) blocks[i].prev_hash = blocks[i - 1].hash;
    blocks[i].hash = ledger::block_hash(blocks[i]);
  }
  std::vector<std::string> lines;
  for (const auto& b : blocks) lines.push_back(ledger::to_log_line(b));

  const auto r = audit(lines);
  EXPECT_TRUE(check(r, "hash_chain").passed);
  const auto& lost = check(r, "no_lost_tx");
  EXPECT_FALSE(lost.passed);
  EXPECT_NE(lost.detail.find(victim), std::string::npos);
}

TEST_F(AuditFixture, DeletedTransactionWithoutRehashBreaksChain) {
  auto block = blocks_[3];
  block.txs.pop_back();
  auto lines = lines_;
  lines[3] = ledger::to_log_line(block);
  const auto& chain = check(audit(lines), "hash_chain");
  EXPECT_FALSE(chain.passed);
  EXPECT_NE(chain.detail.find("block 3"), std::string::npos);
}

TEST_F(AuditFixture, ReplayCatchesDoctoredInventoryAndStatuses) {
  inventory_ += "ghost,cup,0,0,0,1,tello,0,1\n";
  EXPECT_FALSE(check(audit(lines_), "replay").passed);
  inventory_.clear();
  SetUp();
  commits_[4].status = ledger::TxStatus::Invalidated;
  EXPECT_FALSE(check(audit(lines_), "replay").passed);
}

TEST(Runner, WritesSixFilesAndIsDeterministic) {
  auto s = fleetsim::default_scenario();
  s.duration = 5000ms;
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const auto out_a = run_and_export(s, a);
  run_and_export(s, b);
  EXPECT_EQ(out_a.files.size(), 6u);
  EXPECT_TRUE(out_a.audit.passed());
  for (auto name : kRunFiles) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_TRUE(audit_block_log(a / "blocklog.hex").passed());
  fs::remove_all(a);
  fs::remove_all(b);
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CHAINFLEET_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"dt_ms": 0})";
  }
  {
    std::ofstream ok(dir / "short.json");
    ok << R"({"duration_ms": 2000})";
  }
  EXPECT_EQ(run_cli("run " + (dir / "bad.json").string() + " --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "short.json").string() + " --out " + (dir / "out").string()), 0);
  EXPECT_EQ(run_cli("run " + (dir / "short.json").string() + " --out " + (dir / "o2").string() + " --duration-ms 1005"),
            2);
  EXPECT_EQ(run_cli("audit " + (dir / "out" / "blocklog.hex").string()), 0);
  // Two seconds is too short for any detection on one of the robots or its path: stats is strict.
  const int stats = run_cli("stats " + (dir / "out" / "commits.csv").string());
  EXPECT_TRUE(stats == 0 || stats == 1);
  EXPECT_EQ(run_cli("stats " + (dir / "missing.csv").string()), 1);

  const auto env_dir = dir / "from_env";
  EXPECT_EQ(run_cli("run " + (dir / "short.json").string() + " --out " + (dir / "ignored").string() +
                    " && CHAINFLEET_OUT_DIR=" + env_dir.string() + " " + CHAINFLEET_CLI + " run " +
                    (dir / "short.json").string() + " --out " + (dir / "ignored2").string()),
            0);
  EXPECT_TRUE(fs::exists(env_dir / "blocklog.hex"));
  EXPECT_FALSE(fs::exists(dir / "ignored2"));

  auto lines = slurp(dir / "out" / "blocklog.hex");
  lines[lines.find('\n') + 20] ^= 1;
  {
    std::ofstream tampered(dir / "out" / "blocklog.hex", std::ios::trunc);
    tampered << lines;
  }
  EXPECT_EQ(run_cli("audit " + (dir / "out" / "blocklog.hex").string()), 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace chainfleet::harness
