#pragma once

#include "iqcrate/config.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace iqcrate {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kReportSchema = "iqcrate.report";

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNegative = 2 };

/// Outcome of one batch command. Bulk artifacts come back as text so the
/// caller decides where (and whether) to write them.
struct CommandResult {
  int exit_code = kExitError;
  nlohmann::json report;
  std::string fdi_csv;
  std::string trace_csv;
  std::string sdpa;
};

/// Certificate or a not-certified diagnosis naming the failed checks.
CommandResult run_certify(const ProblemConfig& cfg);

/// Closed-loop trace plus the empirical decay summary; exit 2 on a diverging loop.
CommandResult run_simulate(const ProblemConfig& cfg);

/// Certifies, then exports the KYP LMI at the certified rate as SDPA and
/// runs the heuristic P search. Exit 2 when there is no certificate to export.
CommandResult run_emit_lmi(const ProblemConfig& cfg);

/// Re-runs the command recorded in a report from its echoed config and
/// compares the hash and the headline result. Exit 0 when both reproduce.
CommandResult run_reproduce(const nlohmann::json& report, unsigned threads);

/// Config echoed in a report, parsed back.
ProblemConfig config_from_report(const nlohmann::json& report);

}  // namespace iqcrate
