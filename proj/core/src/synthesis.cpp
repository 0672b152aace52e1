#include "iqcrate/synthesis.hpp"

#include "iqcrate/parallel.hpp"

#include <cmath>
#include <vector>

namespace iqcrate {

void SynthesisConfig::validate() const {
  if (half_order < 0) throw Error(ErrorCode::InvalidArgument, "half_order must be >= 0");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
}

Vector fdi_tap_coefficients(const StateSpace& stacked_pair, const SectorBounds& sector, int half_order,
                            double omega) {
  if (stacked_pair.outputs() != 2 || stacked_pair.inputs() != 1)
    throw Error(ErrorCode::DimensionMismatch, "tap coefficients need a SISO coprime pair");
  const CMatrix nm = freq_response(stacked_pair, omega);
  const Eigen::Matrix2d E = sector.transform();
  const Complex a = E(0, 0) * nm(0, 0) + E(0, 1) * nm(1, 0);
  const Complex b = E(1, 0) * nm(0, 0) + E(1, 1) * nm(1, 0);
  const Complex ab = a * std::conj(b);
  Vector coeff(2 * half_order + 1);
  for (int i = -half_order; i <= half_order; ++i)
    coeff(i + half_order) = 2.0 * (std::polar(1.0, -omega * i) * ab).real();
  return coeff;
}

namespace {

// Off-center taps are scaled toward zero just enough to absorb roundoff in
// the window sums; signs and the center tap are untouched.
ZamesFalbFir clean_taps(const Vector& x, int n, double rho) {
  std::vector<double> taps(static_cast<std::size_t>(2 * n + 1), 0.0);
  taps[static_cast<std::size_t>(n)] = 1.0;
  for (int k = 1; k <= n; ++k) {
    taps[static_cast<std::size_t>(n - k)] = std::min(0.0, x(k - 1));
    taps[static_cast<std::size_t>(n + k)] = std::min(0.0, x(n + k - 1));
  }
  double shrink = 1.0;
  for (int sign : {+1, -1}) {
    double neg = 0.0;
    for (int k = 1; k <= n; ++k) {
      neg += taps[static_cast<std::size_t>(n + k)] * std::pow(rho, sign * k) +
             taps[static_cast<std::size_t>(n - k)] * std::pow(rho, -sign * k);
      if (neg < -1.0) shrink = std::min(shrink, 1.0 / -neg);
    }
  }
  if (shrink < 1.0) {
    for (int k = 1; k <= n; ++k) {
      taps[static_cast<std::size_t>(n - k)] *= shrink;
      taps[static_cast<std::size_t>(n + k)] *= shrink;
    }
  }
  return ZamesFalbFir(std::move(taps));
}

}  // namespace

SynthesisResult synthesize_multiplier(const CoprimePair& pair, const SectorBounds& sector, Rate rho,
                                      const SynthesisConfig& cfg) {
  cfg.validate();
  const StateSpace stacked = pair.stacked();
  if (stacked.inputs() != 1) throw Error(ErrorCode::DimensionMismatch, "multiplier synthesis is SISO only");
  const int n = cfg.half_order;
  const double r = rho.value();
  const FrequencyGrid grid = FrequencyGrid::uniform(cfg.grid_points);
  const std::size_t g = grid.size();

  // Variables: m_{-n..-1}, m_{1..n}, t. Constraint rows: grid, signs, windows.
  const int nv = 2 * n + 1;
  const Eigen::Index rows = static_cast<Eigen::Index>(g) + 2 * n + 4 * n;
  Matrix A = Matrix::Zero(rows, nv);
  Vector b = Vector::Zero(rows);

  std::vector<Vector> coeffs(g);
  parallel_for(g, cfg.threads, [&](std::size_t i) { coeffs[i] = fdi_tap_coefficients(stacked, sector, n, grid[i]); });
  for (std::size_t i = 0; i < g; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (int k = 1; k <= n; ++k) {
      A(row, k - 1) = coeffs[i](n - k);
      A(row, n + k - 1) = coeffs[i](n + k);
    }
    A(row, nv - 1) = -1.0;
    b(row) = -coeffs[i](n);
  }
  Eigen::Index row = static_cast<Eigen::Index>(g);
  for (int v = 0; v < 2 * n; ++v) A(row++, v) = 1.0;  // m_i <= 0
  for (int K = 1; K <= n; ++K) {
    for (int sign : {+1, -1}) {
      // -sum_{0<|i|<=K} m_i rho^{sign i} <= m_0 = 1
      for (int k = 1; k <= K; ++k) {
        A(row, k - 1) = -std::pow(r, -sign * k);
        A(row, n + k - 1) = -std::pow(r, sign * k);
      }
      b(row) = 1.0;
      ++row;
    }
  }
  A.conservativeResize(row, Eigen::NoChange);
  b.conservativeResize(row);

  Vector c = Vector::Zero(nv);
  c(nv - 1) = 1.0;
  const LpResult lp = lp_solve(A, b, c);

  SynthesisResult out;
  out.lp_status = lp.status;
  if (lp.status == LpStatus::IterationCap || lp.status == LpStatus::NumericalFailure)
    throw Error(ErrorCode::LpNumericalFailure, "multiplier LP: " + std::string(to_string(lp.status)));
  if (lp.status != LpStatus::Optimal) {
    out.diagnosis = "multiplier LP " + std::string(to_string(lp.status));
    return out;
  }
  out.lp_objective = lp.x(nv - 1);
  if (out.lp_objective > -cfg.epsilon) {
    out.diagnosis = "best grid margin " + std::to_string(out.lp_objective) + " is not below -epsilon";
    return out;
  }

  ZamesFalbFir zf = clean_taps(lp.x, n, r);
  const RhoValidity validity = check_rho_validity(zf, r);
  if (!validity.valid) {
    out.diagnosis = "LP taps fail validity: " + validity.first_violation->describe();
    return out;
  }
  const PiProvider pi = zames_falb_provider(zf, sector);
  FdiReport rep = fdi_margin(pair, pi, grid, cfg.threads);
  if (cfg.refine_factor > 1) rep = refine_near_minimum(rep, pair, pi, cfg.refine_factor, cfg.threads);
  out.recheck = rep;
  if (!rep.certified(cfg.epsilon)) {
    out.diagnosis = "refined FDI re-check margin " + std::to_string(rep.margin) + " is not below -epsilon";
    return out;
  }
  out.feasible = true;
  out.multiplier = std::move(zf);
  return out;
}

}  // namespace iqcrate
