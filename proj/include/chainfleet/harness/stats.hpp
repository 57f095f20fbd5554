#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chainfleet/ledger/types.hpp"

namespace chainfleet::harness {

enum class HarnessErrc { MissingChaincode, MalformedCsv, InvariantViolation };

const char* to_string(HarnessErrc code);

class HarnessError : public std::runtime_error {
 public:
  HarnessError(HarnessErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  HarnessErrc code() const noexcept { return code_; }

 private:
  HarnessErrc code_;
};

// The five contracts of the mission, in report order.
inline constexpr std::array<std::string_view, 5> kChaincodes{"battery", "tello-path", "tello-objects", "dashgo-path",
                                                             "dashgo-objects"};

struct LatencySummary {
  std::string chaincode;
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;  // ms
  std::vector<double> outliers;                         // beyond 1.5 IQR from the box, ascending

  double iqr() const { return q3 - q1; }
};

/// Linear-interpolation quantile (Hyndman-Fan type 7) of ascending data.
double quantile(std::span<const double> sorted, double p);

// Throws MissingChaincode when `latencies` is empty.
LatencySummary summarize(std::string chaincode, std::vector<double> latencies);

/// One summary per contract in kChaincodes over valid commits.
/// Throws MissingChaincode naming the first contract without any.
std::vector<LatencySummary> latency_stats(std::span<const ledger::CommitRecord> commits);
// Same, skipping contracts that have no valid commits.
std::vector<LatencySummary> available_latency_stats(std::span<const ledger::CommitRecord> commits);

// tx_id,chaincode,submit_ms,commit_ms,latency_ms,status
void write_commits_csv(std::ostream& out, std::span<const ledger::CommitRecord> commits);
// Throws MalformedCsv with the line number.
std::vector<ledger::CommitRecord> read_commits_csv(std::istream& in);

// chaincode,n,min_ms,q1_ms,median_ms,q3_ms,max_ms,outliers_ms (';'-separated)
void write_latency_summary_csv(std::ostream& out, std::span<const LatencySummary> summaries);

}  // namespace chainfleet::harness
