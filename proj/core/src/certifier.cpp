#include "iqcrate/certifier.hpp"

#include "iqcrate/factorization.hpp"
#include "iqcrate/linalg.hpp"

#include <cmath>
#include <limits>

namespace iqcrate {

std::function<double(double)> inverse_sqrt_gain(double a, double b, double c) {
  return [a, b, c](double rho) {
    const double radicand = b * rho * rho - c;
    if (!(radicand > 0.0)) return std::numeric_limits<double>::infinity();
    return a / std::sqrt(radicand);
  };
}

namespace {

bool is_scaled_identity(const Matrix& block, double& value) {
  value = block(0, 0);
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      const double expect = i == j ? value : 0.0;
      if (std::abs(block(i, j) - expect) > 1e-14 * scale) return false;
    }
  return true;
}

std::optional<Matrix> scalar_blocks(const Matrix& M, Eigen::Index d) {
  if (M.rows() % d != 0 || M.cols() % d != 0) return std::nullopt;
  Matrix out(M.rows() / d, M.cols() / d);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      double v = 0.0;
      if (!is_scaled_identity(M.block(i * d, j * d, d, d), v)) return std::nullopt;
      out(i, j) = v;
    }
  return out;
}

std::vector<double> default_centers(const DeltaClass& cls) {
  if (const auto* s = std::get_if<SlopeRestricted>(&cls)) {
    const SectorBounds& b = s->sector;
    return {b.m, 0.5 * (b.m + b.L), b.L};
  }
  if (const auto* g = std::get_if<GainBounded>(&cls)) return {-g->g_max, 0.0, g->g_max};
  return {0.0};
}

Matrix closed_loop(const StateSpace& G, double c) { return G.A() + c * G.B() * G.C(); }

FdiReport fixed_pi_report(const StateSpace& G, const Matrix& pi, double rho, const SynthesisConfig& s) {
  const CoprimePair pair = rcf(G, Rate(rho));
  const PiProvider provider = constant_provider(pi);
  FdiReport rep = fdi_margin(pair, provider, FrequencyGrid::uniform(s.grid_points), s.threads);
  if (s.refine_factor > 1) rep = refine_near_minimum(rep, pair, provider, s.refine_factor, s.threads);
  return rep;
}

FdiReport zf_report(const StateSpace& G, const ZamesFalbFir& zf, const SectorBounds& sector, int p, double rho,
                    const SynthesisConfig& s) {
  const CoprimePair pair = rcf(G, Rate(rho));
  const PiProvider provider = zames_falb_provider(zf, sector, p);
  FdiReport rep = fdi_margin(pair, provider, FrequencyGrid::uniform(s.grid_points), s.threads);
  if (s.refine_factor > 1) rep = refine_near_minimum(rep, pair, provider, s.refine_factor, s.threads);
  return rep;
}

}  // namespace

std::optional<std::pair<StateSpace, int>> kronecker_factor(const StateSpace& G) {
  const Eigen::Index d = G.inputs();
  if (d < 1 || G.outputs() != d || G.states() % d != 0) return std::nullopt;
  if (d == 1) return std::make_pair(G, 1);
  auto A = G.states() == 0 ? std::optional<Matrix>(Matrix(0, 0)) : scalar_blocks(G.A(), d);
  auto B = G.states() == 0 ? std::optional<Matrix>(Matrix(0, 1)) : scalar_blocks(G.B(), d);
  auto C = G.states() == 0 ? std::optional<Matrix>(Matrix(1, 0)) : scalar_blocks(G.C(), d);
  auto D = scalar_blocks(G.D(), d);
  if (!A || !B || !C || !D) return std::nullopt;
  return std::make_pair(StateSpace(*A, *B, *C, *D), static_cast<int>(d));
}

RateCheck check_rate(const StateSpace& G, const DeltaClass& cls, double rho, const CertifyConfig& cfg) {
  RateCheck out;
  out.rho = rho;
  const Rate r(rho);

  std::vector<double> centers = default_centers(cls);
  for (double c : cfg.center_gains) centers.push_back(c);
  for (double c : centers) {
    const SchurReport rep = is_schur(closed_loop(G, c) / rho);
    if (rep.schur) {
      out.center_ok = true;
      out.center_gain = c;
      out.schur = rep;
      break;
    }
    if (!out.center_ok) out.schur = rep;
  }
  if (!out.center_ok) out.diagnosis = "no center gain gives r(A + cBC) < rho";

  const SynthesisConfig& s = cfg.synthesis;
  if (const auto* sr = std::get_if<SlopeRestricted>(&cls)) {
    const auto factor = kronecker_factor(G);
    if (!factor) throw Error(ErrorCode::InvalidClass, "slope-restricted synthesis needs a SISO or G (x) I_d plant");
    const auto& [scalar, d] = *factor;
    const SynthesisResult syn = synthesize_multiplier(rcf(scalar, r), sr->sector, r, s);
    // Synthesized taps are rho-valid by construction; a failed search is an FDI failure.
    out.validity_ok = true;
    if (!syn.feasible) {
      out.fdi = syn.recheck;
      out.fdi.margin = syn.recheck.points.empty() ? syn.lp_objective : syn.recheck.margin;
      if (out.diagnosis.empty()) out.diagnosis = syn.diagnosis;
      return out;
    }
    out.multiplier = *syn.multiplier;
    out.fdi = d == 1 ? syn.recheck : zf_report(G, *syn.multiplier, sr->sector, d, rho, s);
    out.fdi_ok = out.fdi.certified(s.epsilon);
    if (!out.fdi_ok && out.diagnosis.empty()) out.diagnosis = "Kronecker FDI re-check failed on the full plant";
    return out;
  }

  Matrix pi;
  if (const auto* gb = std::get_if<GainBounded>(&cls)) {
    const double g = gb->gain(rho);
    out.validity_ok = g <= gb->g_max;
    if (!out.validity_ok && out.diagnosis.empty())
      out.diagnosis = "class gain bound " + std::to_string(g) + " exceeds " + std::to_string(gb->g_max);
    pi = static_gain_pi(gb->g_max, static_cast<int>(G.inputs()));
  } else {
    const auto& cc = std::get<CustomClass>(cls);
    out.validity_ok = cc.valid(rho);
    if (!out.validity_ok && out.diagnosis.empty()) out.diagnosis = "custom class predicate false";
    pi = cc.pi;
  }
  out.multiplier = StaticMultiplier{pi};
  out.fdi = fixed_pi_report(G, pi, rho, s);
  out.fdi_ok = out.fdi.certified(s.epsilon);
  if (!out.fdi_ok && out.diagnosis.empty())
    out.diagnosis = "FDI margin " + std::to_string(out.fdi.margin) + " is not below -epsilon";
  return out;
}

CertifyOutcome certify_rate(const StateSpace& G, const DeltaClass& cls, const CertifyConfig& cfg) {
  if (G.D().size() > 0 && G.D().cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "certify_rate requires a strictly proper plant (D = 0)");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "bisection tolerance must be positive");
  const double hi0 = cfg.rho_max > 0.0 ? cfg.rho_max : 1.0 - cfg.tol;
  if (!(cfg.rho_min > 0.0 && cfg.rho_min <= hi0 && hi0 <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho range must satisfy 0 < rho_min <= rho_max <= 1");

  CertifyOutcome out;
  const RateCheck at_one = check_rate(G, cls, 1.0, cfg);
  out.robustly_stable = at_one.passed();

  RateCheck hi_check = check_rate(G, cls, hi0, cfg);
  out.evaluations = 2;
  if (!hi_check.passed()) {
    out.best_failure = hi_check;
    return out;
  }
  double hi = hi0;
  double lo = cfg.rho_min;
  RateCheck lo_check = check_rate(G, cls, lo, cfg);
  ++out.evaluations;
  if (lo_check.passed()) {
    hi = lo;
    hi_check = lo_check;
  } else {
    while (hi - lo > cfg.tol) {
      const double mid = 0.5 * (lo + hi);
      RateCheck mid_check = check_rate(G, cls, mid, cfg);
      ++out.evaluations;
      if (mid_check.passed()) {
        hi = mid;
        hi_check = std::move(mid_check);
      } else {
        lo = mid;
        lo_check = std::move(mid_check);
      }
    }
    out.best_failure = lo_check;
  }

  Certificate cert;
  cert.rho = hi;
  cert.multiplier = *hi_check.multiplier;
  cert.center_gain = hi_check.center_gain;
  cert.schur_check = hi_check.schur;
  cert.fdi = hi_check.fdi;
  cert.multiplier_valid = true;
  cert.grid_points = cfg.synthesis.grid_points;
  if (const auto factor = kronecker_factor(G)) cert.kronecker_dim = factor->second;
  cert.homotopy_assumed = std::holds_alternative<CustomClass>(cls);
  out.certified = true;
  out.certificate = std::move(cert);
  return out;
}

bool reverify(const StateSpace& G, const DeltaClass& cls, const Certificate& cert, const CertifyConfig& cfg) {
  const double rho = cert.rho;
  if (!is_schur(closed_loop(G, cert.center_gain) / rho).schur) return false;
  const SynthesisConfig& s = cfg.synthesis;
  if (const auto* sr = std::get_if<SlopeRestricted>(&cls)) {
    const auto* zf = std::get_if<ZamesFalbFir>(&cert.multiplier);
    if (zf == nullptr || !check_rho_validity(*zf, rho).valid) return false;
    return zf_report(G, *zf, sr->sector, static_cast<int>(G.inputs()), rho, s).certified(s.epsilon);
  }
  const auto* sm = std::get_if<StaticMultiplier>(&cert.multiplier);
  if (sm == nullptr) return false;
  if (const auto* gb = std::get_if<GainBounded>(&cls)) {
    if (!(gb->gain(rho) <= gb->g_max)) return false;
  } else if (!std::get<CustomClass>(cls).valid(rho)) {
    return false;
  }
  return fixed_pi_report(G, sm->pi, rho, s).certified(s.epsilon);
}

double min_gain_on_circle(const StateSpace& H, double rho, std::size_t grid_points) {
  if (H.inputs() != 1 || H.outputs() != 1) throw Error(ErrorCode::DimensionMismatch, "min_gain_on_circle is SISO");
  const FrequencyGrid grid = FrequencyGrid::uniform(grid_points);
  double lowest = std::numeric_limits<double>::infinity();
  for (double w : grid.points()) lowest = std::min(lowest, std::abs(eval_at(H, std::polar(rho, w))(0, 0)));
  return lowest;
}

TwoSidedScan certify_fixed_pi_two_sided(const StateSpace& G, const Matrix& pi,
                                        const std::function<bool(double)>& delta_valid, double step,
                                        std::size_t grid_points, double epsilon, unsigned threads) {
  if (!(step > 0.0 && step < 1.0)) throw Error(ErrorCode::InvalidArgument, "scan step must lie in (0, 1)");
  if (G.inputs() != 1 || G.outputs() != 1) throw Error(ErrorCode::DimensionMismatch, "two-sided scan is SISO");
  SynthesisConfig s;
  s.grid_points = grid_points;
  s.epsilon = epsilon;
  s.threads = threads;

  TwoSidedScan out;
  bool fdi_run = true;
  bool full_run = true;
  for (int k = 0;; ++k) {
    const double rho = 1.0 - k * step;
    if (!(rho > 0.0) || (!fdi_run && !full_run)) break;
    ++out.evaluations;
    const bool fdi_ok = fixed_pi_report(G, pi, rho, s).certified(epsilon);
    if (fdi_run) {
      if (fdi_ok) out.fdi_only_rho = rho;
      else fdi_run = false;
    }
    if (full_run) {
      const bool ok = fdi_ok && delta_valid(rho);
      if (ok) {
        out.certified = true;
        out.rho = rho;
      } else {
        full_run = false;
        out.diagnosis = std::string("first failure at rho = ") + std::to_string(rho) + (fdi_ok ? " (class validity)" : " (FDI)");
      }
    }
  }
  if (!out.certified) out.diagnosis = "NoneCertified: " + out.diagnosis;
  return out;
}

WellPosedness check_well_posedness(const StateSpace& G, const DeltaClass& cls) {
  const double dnorm = G.D().size() == 0 ? 0.0 : linalg::spectral_norm(G.D());
  if (dnorm == 0.0) return {true, "strictly proper plant: zero instantaneous gain, the loop is explicit"};
  if (G.states() == 0) {
    double delta_gain = std::numeric_limits<double>::infinity();
    if (const auto* s = std::get_if<SlopeRestricted>(&cls)) delta_gain = std::max(std::abs(s->sector.m), std::abs(s->sector.L));
    else if (const auto* g = std::get_if<GainBounded>(&cls)) delta_gain = g->g_max;
    const double product = dnorm * delta_gain;
    if (product < 1.0) return {true, "static plant: ||D|| * gamma(Delta) = " + std::to_string(product) + " < 1"};
    return {false, "static plant: ||D|| * gamma(Delta) = " + std::to_string(product) + " >= 1"};
  }
  return {false, "D != 0: the instantaneous-gain product is not verified for dynamic plants"};
}

}  // namespace iqcrate
