#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

#include "chainfleet/fleetsim/scenario.hpp"
#include "chainfleet/harness/audit.hpp"

namespace chainfleet::harness {

inline constexpr std::array<std::string_view, 6> kRunFiles{"trajectories.csv", "events.csv",    "commits.csv",
                                                           "latency_summary.csv", "inventory.csv", "blocklog.hex"};
inline constexpr std::string_view kLocalizationFile = "localization.csv";

struct RunOutputs {
  std::vector<std::filesystem::path> files;
  AuditReport audit;
};

/// Runs the scenario to completion and writes kRunFiles into out_dir
/// (created if needed), plus localization.csv on request. The written block
/// log is audited before returning; any failure throws
/// HarnessError(InvariantViolation).
RunOutputs run_and_export(const fleetsim::Scenario& scenario, const std::filesystem::path& out_dir,
                          bool localization_csv = false);

}  // namespace chainfleet::harness
