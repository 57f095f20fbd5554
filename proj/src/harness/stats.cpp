#include "chainfleet/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "chainfleet/common/text.hpp"

namespace chainfleet::harness {

const char* to_string(HarnessErrc code) {
  switch (code) {
    case HarnessErrc::MissingChaincode: return "MissingChaincode";
    case HarnessErrc::MalformedCsv: return "MalformedCsv";
    case HarnessErrc::InvariantViolation: return "InvariantViolation";
  }
  return "HarnessError";
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

LatencySummary summarize(std::string chaincode, std::vector<double> latencies) {
  if (latencies.empty()) throw HarnessError(HarnessErrc::MissingChaincode, chaincode);
  std::sort(latencies.begin(), latencies.end());
  LatencySummary s;
  s.chaincode = std::move(chaincode);
  s.n = latencies.size();
  s.min = latencies.front();
  s.max = latencies.back();
  s.q1 = quantile(latencies, 0.25);
  s.median = quantile(latencies, 0.5);
  s.q3 = quantile(latencies, 0.75);
  const double lo = s.q1 - 1.5 * s.iqr();
  const double hi = s.q3 + 1.5 * s.iqr();
  for (double v : latencies) {
    if (v < lo || v > hi) s.outliers.push_back(v);
  }
  return s;
}

namespace {

std::map<std::string, std::vector<double>, std::less<>> group(std::span<const ledger::CommitRecord> commits) {
  std::map<std::string, std::vector<double>, std::less<>> by_chaincode;
  for (const auto& c : commits) {
    if (c.status == ledger::TxStatus::Valid) by_chaincode[c.chaincode].push_back(static_cast<double>(c.latency.count()));
  }
  return by_chaincode;
}

}  // namespace

std::vector<LatencySummary> latency_stats(std::span<const ledger::CommitRecord> commits) {
  auto grouped = group(commits);
  std::vector<LatencySummary> out;
  for (auto name : kChaincodes) {
    auto it = grouped.find(name);
    out.push_back(summarize(std::string(name), it == grouped.end() ? std::vector<double>{} : std::move(it->second)));
  }
  return out;
}

std::vector<LatencySummary> available_latency_stats(std::span<const ledger::CommitRecord> commits) {
  auto grouped = group(commits);
  std::vector<LatencySummary> out;
  for (auto name : kChaincodes) {
    auto it = grouped.find(name);
    if (it != grouped.end()) out.push_back(summarize(std::string(name), std::move(it->second)));
  }
  return out;
}

void write_commits_csv(std::ostream& out, std::span<const ledger::CommitRecord> commits) {
  out << "tx_id,chaincode,submit_ms,commit_ms,latency_ms,status\n";
  for (const auto& c : commits) {
    out << c.tx_id << ',' << c.chaincode << ',' << c.submit_time.count() << ',' << c.commit_time.count() << ','
        << c.latency.count() << ',' << ledger::to_string(c.status) << '\n';
  }
}

std::vector<ledger::CommitRecord> read_commits_csv(std::istream& in) {
  std::vector<ledger::CommitRecord> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw HarnessError(HarnessErrc::MalformedCsv, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "tx_id,chaincode,submit_ms,commit_ms,latency_ms,status") fail("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) fail("expected 6 columns");
    ledger::CommitRecord c;
    c.tx_id = cols[0];
    c.chaincode = cols[1];
    try {
      c.submit_time = Millis{parse_int(cols[2])};
      c.commit_time = Millis{parse_int(cols[3])};
      c.latency = Millis{parse_int(cols[4])};
    } catch (const std::exception&) {
      fail("non-integer time");
    }
    if (cols[5] == "valid") {
      c.status = ledger::TxStatus::Valid;
    } else if (cols[5] == "invalidated") {
      c.status = ledger::TxStatus::Invalidated;
    } else {
      fail("unknown status " + cols[5]);
    }
    if (c.latency != c.commit_time - c.submit_time || c.latency < Millis{0}) fail("latency does not match timestamps");
    out.push_back(std::move(c));
  }
  if (line_no == 0) throw HarnessError(HarnessErrc::MalformedCsv, "empty file");
  return out;
}

void write_latency_summary_csv(std::ostream& out, std::span<const LatencySummary> summaries) {
  out << "chaincode,n,min_ms,q1_ms,median_ms,q3_ms,max_ms,outliers_ms\n";
  for (const auto& s : summaries) {
    out << s.chaincode << ',' << s.n << ',' << format_double(s.min) << ',' << format_double(s.q1) << ','
        << format_double(s.median) << ',' << format_double(s.q3) << ',' << format_double(s.max) << ',';
    for (std::size_t i = 0; i < s.outliers.size(); ++i) out << (i ? ";" : "") << format_double(s.outliers[i]);
    out << '\n';
  }
}

}  // namespace chainfleet::harness
