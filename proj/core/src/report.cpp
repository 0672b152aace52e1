#include "iqcrate/report.hpp"

#include "iqcrate/factorization.hpp"
#include "iqcrate/lmi.hpp"
#include "iqcrate/sdpa.hpp"

#include <cmath>
#include <random>
#include <sstream>

#ifndef IQCRATE_VERSION
#define IQCRATE_VERSION "unknown"
#endif

namespace iqcrate {

using nlohmann::json;

namespace {

json envelope(const ProblemConfig& cfg, const std::string& command) {
  return {{"schema", kReportSchema},
          {"schema_version", kReportSchemaVersion},
          {"tool_version", IQCRATE_VERSION},
          {"command", command},
          {"config_hash", config_hash(cfg)},
          {"config", config_to_json(cfg)}};
}

// JSON has no infinities; they become strings so reports stay parseable.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string_view schur_status(SchurStatus s) {
  switch (s) {
    case SchurStatus::Certified: return "certified";
    case SchurStatus::NotPositiveDefinite: return "not_positive_definite";
    case SchurStatus::IllConditioned: return "ill_conditioned";
  }
  return "unknown";
}

json schur_json(const SchurReport& s) {
  return {{"passed", s.schur},
          {"status", std::string(schur_status(s.status))},
          {"min_pivot_ratio", num(s.min_pivot_ratio)},
          {"residual", num(s.residual)}};
}

json fdi_json(const FdiReport& f, double epsilon) {
  return {{"passed", f.certified(epsilon)},
          {"margin", num(f.margin)},
          {"argmax_omega", num(f.argmax)},
          {"epsilon", epsilon},
          {"grid_points", f.points.size()}};
}

json multiplier_json(const CertifiedMultiplier& m) {
  if (const auto* zf = std::get_if<ZamesFalbFir>(&m))
    return {{"type", "zames_falb_fir"}, {"half_order", zf->half_order()}, {"taps", zf->taps()}};
  return {{"type", "static"}, {"matrix", matrix_json(std::get<StaticMultiplier>(m).pi)}};
}

std::string fdi_csv(const FdiReport& f) {
  std::ostringstream os;
  write_fdi_csv(f, os);
  return os.str();
}

json well_posed_json(const StateSpace& G, const ProblemConfig& cfg) {
  WellPosedness wp;
  if (cfg.delta.kind == DeltaKind::TwoSidedFixedPi) {
    wp.well_posed = G.strictly_proper();
    wp.explanation = wp.well_posed ? "plant is strictly proper"
                                   : "plant has D != 0; the instantaneous-gain product is not verified for this class";
  } else {
    wp = check_well_posedness(G, build_delta_class(cfg));
  }
  return {{"well_posed", wp.well_posed}, {"explanation", wp.explanation}};
}

// What emit-lmi needs from a successful certification.
struct CertifiedLoop {
  double rho = 1.0;
  CertifiedMultiplier multiplier;
};

struct CertifyRun {
  CommandResult result;
  std::optional<CertifiedLoop> loop;
};

CertifyRun certify_two_sided(const ProblemConfig& cfg, const StateSpace& G) {
  const DeltaSpec& d = cfg.delta;
  const StateSpace H = d.validity_system
                           ? StateSpace(d.validity_system->A, d.validity_system->B, d.validity_system->C,
                                        d.validity_system->D)
                           : G;
  if (G.inputs() != 1 || G.outputs() != 1 || H.inputs() != 1 || H.outputs() != 1)
    throw Error(ErrorCode::DimensionMismatch, "two_sided_fixed_pi needs SISO plant and validity system");
  const auto grid = static_cast<std::size_t>(cfg.grid);
  const double floor = d.validity_floor;
  auto valid = [H, floor, grid](double rho) { return min_gain_on_circle(H, rho, grid) > floor; };
  const TwoSidedScan scan = certify_fixed_pi_two_sided(G, d.pi, valid, d.scan_step, grid, cfg.epsilon, cfg.threads);

  CertifyRun run;
  json res;
  res["status"] = scan.certified ? "certified" : "not_certified";
  res["rho_certified"] = scan.certified ? json(scan.rho) : json(nullptr);
  res["fdi_only_rho"] = scan.fdi_only_rho;
  res["evaluations"] = scan.evaluations;
  res["diagnosis"] = scan.diagnosis;
  res["certification"] = "grid-certified (FDI)";
  res["well_posedness"] = well_posed_json(G, cfg);
  if (scan.certified) {
    const CoprimePair pair = rcf(G, Rate(scan.rho));
    const FdiReport f = fdi_margin(pair, constant_provider(d.pi), FrequencyGrid::uniform(grid), cfg.threads);
    res["certificate"] = {{"rho", scan.rho},
                          {"multiplier", multiplier_json(StaticMultiplier{d.pi})},
                          {"checks",
                           {{"fdi", fdi_json(f, cfg.epsilon)},
                            {"delta_validity", {{"passed", true}, {"min_gain_floor", floor}}}}},
                          {"homotopy_assumed", false}};
    run.result.fdi_csv = fdi_csv(f);
    run.loop = CertifiedLoop{scan.rho, StaticMultiplier{d.pi}};
  }
  run.result.report["result"] = res;
  run.result.exit_code = scan.certified ? kExitOk : kExitNegative;
  return run;
}

CertifyRun certify_bisection(const ProblemConfig& cfg, const StateSpace& G) {
  const DeltaClass cls = build_delta_class(cfg);
  const CertifyOutcome out = certify_rate(G, cls, build_certify_config(cfg));
  CertifyRun run;
  json res;
  res["status"] = out.certified ? "certified" : "not_certified";
  res["rho_certified"] = out.certified ? json(out.certificate->rho) : json(nullptr);
  res["robustly_stable_at_rho_one"] = out.robustly_stable;
  res["evaluations"] = out.evaluations;
  res["certification"] = "grid-certified (FDI)";
  res["well_posedness"] = well_posed_json(G, cfg);
  if (out.certified) {
    const Certificate& c = *out.certificate;
    res["certificate"] = {{"rho", c.rho},
                          {"multiplier", multiplier_json(c.multiplier)},
                          {"center_gain", c.center_gain},
                          {"checks",
                           {{"spectral_radius", schur_json(c.schur_check)},
                            {"fdi", fdi_json(c.fdi, cfg.epsilon)},
                            {"multiplier_valid", {{"passed", c.multiplier_valid}}}}},
                          {"grid_points", c.grid_points},
                          {"kronecker_dim", c.kronecker_dim},
                          {"homotopy_assumed", c.homotopy_assumed}};
    run.result.fdi_csv = fdi_csv(c.fdi);
    run.loop = CertifiedLoop{c.rho, c.multiplier};
    json warnings = json::array();
    if (const auto* gb = std::get_if<GainBounded>(&cls); gb && std::abs(c.center_gain) > gb->g_max) {
      std::ostringstream os;
      os << "center gain " << c.center_gain << " lies outside the gain ball |c| <= " << gb->g_max
         << "; the path from the center to the class is not covered by the multiplier";
      warnings.push_back(os.str());
    }
    if (c.homotopy_assumed) warnings.push_back("custom class: path-connectedness to the center is assumed");
    res["warnings"] = warnings;
  } else {
    const RateCheck& f = out.best_failure;
    json failed = json::array();
    if (!f.center_ok) failed.push_back("spectral_radius");
    if (!f.validity_ok) failed.push_back("multiplier_valid");
    if (!f.fdi_ok) failed.push_back("fdi");
    res["diagnosis"] = {{"rho", f.rho},
                        {"failed_checks", failed},
                        {"spectral_radius", schur_json(f.schur)},
                        {"fdi_margin", num(f.fdi.margin)},
                        {"message", f.diagnosis}};
    if (!f.fdi.points.empty()) run.result.fdi_csv = fdi_csv(f.fdi);
  }
  run.result.report["result"] = res;
  run.result.exit_code = out.certified ? kExitOk : kExitNegative;
  return run;
}

CertifyRun certify_run(const ProblemConfig& cfg) {
  const StateSpace G = build_plant(cfg);
  CertifyRun run = cfg.delta.kind == DeltaKind::TwoSidedFixedPi ? certify_two_sided(cfg, G) : certify_bisection(cfg, G);
  json full = envelope(cfg, "certify");
  full["result"] = run.result.report["result"];
  run.result.report = std::move(full);
  return run;
}

Vector initial_state(const ProblemConfig& cfg, const StateSpace& G) {
  const auto& x0 = cfg.simulation.x0;
  const Eigen::Index n = G.states();
  if (cfg.method) {
    const Eigen::Index d = cfg.method->dimension;
    if (x0.empty()) return Vector::Ones(n);
    if (static_cast<Eigen::Index>(x0.size()) == n) return Eigen::Map<const Vector>(x0.data(), n);
    if (static_cast<Eigen::Index>(x0.size()) != d)
      throw Error(ErrorCode::ConfigError, "field 'simulation.x0': expected " + std::to_string(d) + " or " +
                                              std::to_string(n) + " entries");
    Vector xi(n);
    for (Eigen::Index c = 0; c < n / d; ++c) xi.segment(c * d, d) = Eigen::Map<const Vector>(x0.data(), d);
    return xi;
  }
  if (x0.empty()) return Vector::Ones(n);
  if (static_cast<Eigen::Index>(x0.size()) != n)
    throw Error(ErrorCode::ConfigError, "field 'simulation.x0': expected " + std::to_string(n) + " entries");
  return Eigen::Map<const Vector>(x0.data(), n);
}

}  // namespace

CommandResult run_certify(const ProblemConfig& cfg) { return certify_run(cfg).result; }

CommandResult run_simulate(const ProblemConfig& cfg) {
  const StateSpace G = build_plant(cfg);
  if (!G.strictly_proper())
    throw Error(ErrorCode::InvalidArgument, "simulate needs a strictly proper plant (D = 0)");
  const NonlinearityDescriptor delta = build_nonlinearity(cfg);
  const Vector x0 = initial_state(cfg, G);
  const SimulationSpec& s = cfg.simulation;
  const Eigen::Index p = G.outputs();

  Signal d1, d2;
  if (s.disturbance_scale != 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(p, s.horizon), b(p, s.horizon);
    double decay = s.disturbance_scale;
    for (Eigen::Index k = 0; k < s.horizon; ++k) {
      for (Eigen::Index i = 0; i < p; ++i) {
        a(i, k) = decay * normal(rng);
        b(i, k) = decay * normal(rng);
      }
      decay *= s.disturbance_rate;
    }
    d1 = Signal(std::move(a));
    d2 = Signal(std::move(b));
  }
  const LuryeTrace tr = simulate_lurye(G, delta, d1, d2, x0, s.horizon);

  // Quadratic objectives report the decay of the distance to the optimum.
  const Eigen::Index T = tr.overflow_step ? *tr.overflow_step : s.horizon;
  Matrix err = tr.y.samples().leftCols(T);
  const NonlinearitySpec& nl = s.nonlinearity;
  if (nl.kind == "quadratic" && !nl.optimum.empty())
    for (Eigen::Index i = 0; i < p; ++i) err.row(i).array() -= nl.optimum[nl.optimum.size() == 1 ? 0 : i];
  const DecayFit fit = empirical_decay_rate(Signal(err), s.burn_in);
  const bool diverging = tr.overflow || (!fit.all_zero && fit.rate > 1.0);

  CommandResult out;
  out.report = envelope(cfg, "simulate");
  out.report["result"] = {{"status", diverging ? "diverging" : "converging"},
                          {"horizon", s.horizon},
                          {"rows", T == s.horizon ? T : T + 1},
                          {"overflow", tr.overflow},
                          {"overflow_step", tr.overflow_step ? json(*tr.overflow_step) : json(nullptr)},
                          {"rho_empirical", num(fit.rate)},
                          {"r_squared", num(fit.r_squared)},
                          {"all_zero", fit.all_zero},
                          {"fit_samples", fit.samples},
                          {"transient_peak", num(fit.all_zero || !(fit.rate > 0.0) ? 0.0 : weighted_peak(Signal(err), fit.rate))},
                          {"nonlinearity", delta.label}};
  std::ostringstream csv;
  write_trace_csv(tr, csv);
  out.trace_csv = csv.str();
  out.exit_code = diverging ? kExitNegative : kExitOk;
  return out;
}

CommandResult run_emit_lmi(const ProblemConfig& cfg) {
  CertifyRun cert = certify_run(cfg);
  CommandResult out;
  out.report = envelope(cfg, "emit-lmi");
  if (!cert.loop) {
    out.report["result"] = {{"status", "not_certified"},
                            {"message", "no certificate to export; run certify for the diagnosis"}};
    out.exit_code = kExitNegative;
    return out;
  }
  const StateSpace G = build_plant(cfg);
  const int p = static_cast<int>(G.outputs());
  const CertifiedLoop& loop = *cert.loop;
  PsiFactorization fact;
  if (const auto* zf = std::get_if<ZamesFalbFir>(&loop.multiplier)) {
    fact = psi_factorize_fir(*zf, cfg.delta.sector, p);
  } else {
    fact = psi_static(std::get<StaticMultiplier>(loop.multiplier).pi);
  }
  const CoprimePair pair = rcf(G, Rate(loop.rho));
  const KypLmi lmi = build_kyp_lmi(G, pair, fact);
  std::ostringstream sdpa;
  write_sdpa(kyp_to_sdpa(lmi), sdpa);
  out.sdpa = sdpa.str();

  json search;
  std::string kind = "grid-certified (FDI)";
  if (lmi.dim() <= kSubgradientDimensionGuard) {
    SubgradientOptions opts;
    opts.stop_below = -10.0 * cfg.epsilon;
    const SubgradientResult r = search_p_subgradient(lmi, opts);
    const double verified = verify_candidate_p(lmi, r.P);
    const bool ok = verified <= -cfg.epsilon;
    if (ok) kind = "continuum-certified (LMI with verified P)";
    search = {{"heuristic", true},
              {"iterations", r.iterations},
              {"initial_lambda_max", num(r.initial_lambda_max)},
              {"lambda_max", num(verified)},
              {"verified", ok}};
  } else {
    search = {{"heuristic", true}, {"skipped", "dimension above the subgradient guard"}};
  }
  const Eigen::Index n = lmi.states();
  out.report["result"] = {{"status", "exported"},
                          {"rho", loop.rho},
                          {"multiplier", multiplier_json(loop.multiplier)},
                          {"lmi",
                           {{"dimension", lmi.dim()},
                            {"p_size", n},
                            {"variables", n * (n + 1) / 2 + 1},
                            {"search", search}}},
                          {"certification", kind}};
  out.fdi_csv = cert.result.fdi_csv;
  out.exit_code = kExitOk;
  return out;
}

ProblemConfig config_from_report(const json& report) {
  if (!report.is_object() || report.value("schema", "") != kReportSchema)
    throw Error(ErrorCode::ConfigError, "not an iqcrate report (missing schema tag)");
  if (report.value("schema_version", 0) != kReportSchemaVersion)
    throw Error(ErrorCode::ConfigError, "unsupported report schema_version");
  if (!report.contains("config")) throw Error(ErrorCode::ConfigError, "report has no config echo");
  return parse_config(report["config"].dump(2), "<report config>");
}

CommandResult run_reproduce(const json& report, unsigned threads) {
  ProblemConfig cfg = config_from_report(report);
  if (threads > 0) cfg.threads = threads;
  const std::string command = report.value("command", "");
  CommandResult rerun;
  if (command == "certify") rerun = run_certify(cfg);
  else if (command == "simulate") rerun = run_simulate(cfg);
  else if (command == "emit-lmi") rerun = run_emit_lmi(cfg);
  else throw Error(ErrorCode::ConfigError, "report records unknown command '" + command + "'");

  const std::string recorded = report.value("config_hash", "");
  const bool hash_match = recorded == config_hash(cfg);
  const bool result_match = report.contains("result") && report["result"] == rerun.report["result"];
  CommandResult out;
  out.report = {{"schema", kReportSchema},
                {"schema_version", kReportSchemaVersion},
                {"tool_version", IQCRATE_VERSION},
                {"command", "report"},
                {"config_hash", config_hash(cfg)},
                {"result",
                 {{"reproduced", hash_match && result_match},
                  {"hash_match", hash_match},
                  {"result_match", result_match},
                  {"recorded_hash", recorded},
                  {"recorded_command", command},
                  {"rerun", rerun.report["result"]}}}};
  out.exit_code = hash_match && result_match ? kExitOk : kExitNegative;
  return out;
}

}  // namespace iqcrate
