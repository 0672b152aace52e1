// iqcrate: batch front end for rate certification, simulation and LMI export.

#include "iqcrate/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using iqcrate::CommandResult;
using iqcrate::ProblemConfig;

struct Flags {
  std::string config;
  unsigned threads = 0;
  std::optional<int> grid;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  std::string report;
  std::string trace_csv;
  std::string fdi_csv;
  std::string sdpa;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw iqcrate::Error(iqcrate::ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw iqcrate::Error(iqcrate::ErrorCode::IoError, "write failed for '" + path + "'");
}

std::string pick(const std::string& flag, const std::string& configured, const std::string& fallback = "") {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  return fallback;
}

ProblemConfig load(const Flags& f) {
  ProblemConfig cfg = iqcrate::load_config(f.config);
  if (f.threads > 0) cfg.threads = f.threads;
  if (f.grid) {
    if (*f.grid < 2) throw iqcrate::Error(iqcrate::ErrorCode::ConfigError, "--grid must be >= 2");
    cfg.grid = *f.grid;
  }
  if (f.order) {
    if (*f.order < 0) throw iqcrate::Error(iqcrate::ErrorCode::ConfigError, "--order must be >= 0");
    cfg.order = *f.order;
  }
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

void emit_report(const CommandResult& r, const std::string& path) {
  const std::string text = r.report.dump(2) + "\n";
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

int run(const std::string& command, const Flags& f) {
  if (command == "report") {
    std::ifstream in(f.config);
    if (!in) throw iqcrate::Error(iqcrate::ErrorCode::IoError, "cannot read report '" + f.config + "'");
    nlohmann::json recorded;
    try {
      recorded = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw iqcrate::Error(iqcrate::ErrorCode::ConfigError, f.config + ": " + e.what());
    }
    const CommandResult r = iqcrate::run_reproduce(recorded, f.threads);
    emit_report(r, f.report);
    return r.exit_code;
  }

  const ProblemConfig cfg = load(f);
  CommandResult r;
  if (command == "certify") {
    r = iqcrate::run_certify(cfg);
  } else if (command == "simulate") {
    r = iqcrate::run_simulate(cfg);
    const std::string path = pick(f.trace_csv, cfg.outputs.trace_csv, cfg.name + "_trace.csv");
    write_file(path, r.trace_csv);
    r.report["artifacts"]["trace_csv"] = path;
  } else {
    r = iqcrate::run_emit_lmi(cfg);
    if (!r.sdpa.empty()) {
      const std::string path = pick(f.sdpa, cfg.outputs.sdpa, cfg.name + ".dat-s");
      write_file(path, r.sdpa);
      r.report["artifacts"]["sdpa"] = path;
    }
  }
  const std::string fdi = pick(f.fdi_csv, cfg.outputs.fdi_csv);
  if (!fdi.empty() && !r.fdi_csv.empty()) {
    write_file(fdi, r.fdi_csv);
    r.report["artifacts"]["fdi_csv"] = fdi;
  }
  emit_report(r, pick(f.report, cfg.outputs.report));
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential convergence rate certificates for Lurye feedback loops"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, const char* config_help) {
    sub->add_option("--config", f.config, config_help)->required();
    sub->add_option("--threads", f.threads, "Worker threads for frequency sweeps (results do not depend on it)")
        ->check(CLI::Range(1u, 256u));
    sub->add_option("--report", f.report, "Report path ('-' for stdout); overrides outputs.report");
  };
  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--grid", f.grid, "Frequency grid points");
    sub->add_option("--order", f.order, "Zames-Falb multiplier half-order");
    sub->add_option("--seed", f.seed, "Seed for randomized nonlinearities and disturbances");
    sub->add_option("--fdi-csv", f.fdi_csv, "Write (omega, lambda_max) CSV here");
  };

  CLI::App* certify = app.add_subcommand("certify", "Bisect for the smallest certified rate");
  add_common(certify, "Problem config (JSON, comments allowed)");
  add_problem(certify);
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate the loop and fit the empirical decay rate");
  add_common(simulate, "Problem config (JSON, comments allowed)");
  add_problem(simulate);
  simulate->add_option("--trace-csv", f.trace_csv, "Trace CSV path (k,u,y,v,w)");
  CLI::App* emit = app.add_subcommand("emit-lmi", "Export the KYP LMI at the certified rate in SDPA format");
  add_common(emit, "Problem config (JSON, comments allowed)");
  add_problem(emit);
  emit->add_option("--sdpa", f.sdpa, "SDPA .dat-s output path");
  CLI::App* report = app.add_subcommand("report", "Re-run a report from its echoed config and compare");
  add_common(report, "Report file written by certify, simulate or emit-lmi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : iqcrate::kExitError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, f);
  } catch (const std::exception& e) {
    std::cerr << "iqcrate " << command << ": " << e.what() << '\n';
    return iqcrate::kExitError;
  }
}
