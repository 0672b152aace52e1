#include "iqcrate/multipliers.hpp"

#include "iqcrate/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace iqcrate {

SectorBounds::SectorBounds(double lower, double upper) : m(lower), L(upper) {
  if (!(lower >= 0.0 && upper >= lower && std::isfinite(upper)))
    throw Error(ErrorCode::InvalidClass, "sector bounds need 0 <= m <= L < inf");
}

Eigen::Matrix2d SectorBounds::transform() const {
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidClass, "the E transform requires L > 0");
  Eigen::Matrix2d E;
  E << 1.0, -1.0 / L, -m, 1.0;
  return E;
}

ZamesFalbFir::ZamesFalbFir(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty() || taps_.size() % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "FIR multiplier needs an odd number of taps (2n+1)");
}

double ZamesFalbFir::tap(int i) const {
  const int n = half_order();
  if (i < -n || i > n) return 0.0;
  return taps_[static_cast<std::size_t>(i + n)];
}

ZamesFalbFir ZamesFalbFir::padded(int n) const {
  if (n < half_order()) throw Error(ErrorCode::InvalidArgument, "cannot pad to a smaller order");
  std::vector<double> out(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (int i = -half_order(); i <= half_order(); ++i) out[static_cast<std::size_t>(i + n)] = tap(i);
  return ZamesFalbFir(std::move(out));
}

std::string Violation::describe() const {
  switch (kind) {
    case ViolationKind::PositiveOffCenterTap:
      return "tap m_" + std::to_string(index) + " = " + std::to_string(value) + " > 0";
    case ViolationKind::WindowSumPlus:
      return "sum_{|i|<=" + std::to_string(index) + "} m_i rho^i = " + std::to_string(value) + " < 0";
    case ViolationKind::WindowSumMinus:
      return "sum_{|i|<=" + std::to_string(index) + "} m_i rho^-i = " + std::to_string(value) + " < 0";
  }
  return "unknown violation";
}

namespace {

double tap_scale(const ZamesFalbFir& zf) {
  double s = 0.0;
  for (double t : zf.taps()) s = std::max(s, std::abs(t));
  return s;
}

// sum_i |m_i| rho^{sign*i}, the magnitude against which window sums are judged.
double abs_weighted_sum(const ZamesFalbFir& zf, double rho, int sign) {
  double s = 0.0;
  for (int i = -zf.half_order(); i <= zf.half_order(); ++i)
    s += std::abs(zf.tap(i)) * std::pow(rho, sign * i);
  return s;
}

}  // namespace

RhoValidity check_rho_validity(const ZamesFalbFir& zf, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const int n = zf.half_order();
  const double scale = tap_scale(zf);
  RhoValidity out;

  for (int i = -n; i <= n; ++i) {
    if (i == 0) continue;
    if (zf.tap(i) > kValidityTolerance * scale) {
      out.valid = false;
      out.first_violation = Violation{ViolationKind::PositiveOffCenterTap, i, zf.tap(i)};
      return out;
    }
  }

  const double abs_plus = abs_weighted_sum(zf, rho, +1);
  const double abs_minus = abs_weighted_sum(zf, rho, -1);
  double plus = 0.0;
  double minus = 0.0;
  for (int K = 0; K <= n; ++K) {
    if (K == 0) {
      plus = minus = zf.tap(0);
    } else {
      plus += zf.tap(K) * std::pow(rho, K) + zf.tap(-K) * std::pow(rho, -K);
      minus += zf.tap(K) * std::pow(rho, -K) + zf.tap(-K) * std::pow(rho, K);
    }
    if (plus < -kValidityTolerance * abs_plus) {
      out.valid = false;
      out.first_violation = Violation{ViolationKind::WindowSumPlus, K, plus};
      return out;
    }
    if (minus < -kValidityTolerance * abs_minus) {
      out.valid = false;
      out.first_violation = Violation{ViolationKind::WindowSumMinus, K, minus};
      return out;
    }
  }
  return out;
}

Complex eval_multiplier(const ZamesFalbFir& zf, double omega) {
  Complex acc{0.0, 0.0};
  for (int i = -zf.half_order(); i <= zf.half_order(); ++i)
    acc += zf.tap(i) * std::polar(1.0, -omega * static_cast<double>(i));
  return acc;
}

CMatrix assemble_pi(const ZamesFalbFir& zf, const SectorBounds& sector, double omega, int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "assemble_pi: p must be >= 1");
  const Complex mz = eval_multiplier(zf, omega);
  Eigen::Matrix2cd core;
  core << Complex(0.0), std::conj(mz), mz, Complex(0.0);
  const Eigen::Matrix2cd E = sector.transform().cast<Complex>();
  const Eigen::Matrix2cd pi = E.transpose() * core * E;
  if (p == 1) return pi;
  CMatrix out = CMatrix::Zero(2 * p, 2 * p);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.block(a * p, b * p, p, p).diagonal().setConstant(pi(a, b));
  return out;
}

StaticGainPi::StaticGainPi(double gain) : g(gain) {
  if (!(gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "static gain multiplier needs g > 0");
}

Matrix StaticGainPi::matrix(int p) const { return static_gain_pi(g, p); }

Matrix static_gain_pi(double g, int p) {
  if (!(g > 0.0)) throw Error(ErrorCode::InvalidArgument, "static gain multiplier needs g > 0");
  Matrix out = Matrix::Zero(2 * p, 2 * p);
  out.topLeftCorner(p, p).diagonal().setConstant(g * g);
  out.bottomRightCorner(p, p).diagonal().setConstant(-1.0);
  return out;
}

Matrix weighted_window_matrix(const ZamesFalbFir& zf, double rho, int window) {
  Matrix W(window, window);
  for (int i = 0; i < window; ++i)
    for (int j = 0; j < window; ++j) W(i, j) = std::pow(rho, -(i + j)) * zf.tap(i - j);
  return W;
}

HyperdominanceReport check_doubly_hyperdominant_window(const ZamesFalbFir& zf, double rho, int window) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (window < 2 * zf.half_order() + 1)
    throw Error(ErrorCode::InvalidArgument, "window must be at least 2n+1");
  const Matrix W = weighted_window_matrix(zf, rho, window);
  const double scale = tap_scale(zf);
  HyperdominanceReport out;

  // Entry (i, j) carries the weight rho^{-i-j}; tolerances scale with it so
  // the verdict matches the unweighted tap tests.
  for (int i = 0; i < window; ++i) {
    for (int j = 0; j < window; ++j) {
      if (i == j) continue;
      const double weight = std::pow(rho, -(i + j));
      if (W(i, j) > kValidityTolerance * scale * weight) {
        out.doubly_hyperdominant = false;
        out.violation = WindowViolation{true, i, window, W(i, j), true};
        return out;
      }
    }
  }

  const double abs_plus = abs_weighted_sum(zf, rho, +1);
  const double abs_minus = abs_weighted_sum(zf, rho, -1);
  // Row i of truncation k sums W(i, 0..k-1); column j sums W(0..k-1, j).
  for (int k = 1; k <= window; ++k) {
    for (int line = 0; line < k; ++line) {
      double row = 0.0;
      double col = 0.0;
      for (int t = 0; t < k; ++t) {
        row += W(line, t);
        col += W(t, line);
      }
      const double weight = std::pow(rho, -2 * line);
      if (row < -kValidityTolerance * abs_plus * weight) {
        out.doubly_hyperdominant = false;
        out.violation = WindowViolation{true, line, k, row, false};
        return out;
      }
      if (col < -kValidityTolerance * abs_minus * weight) {
        out.doubly_hyperdominant = false;
        out.violation = WindowViolation{false, line, k, col, false};
        return out;
      }
    }
  }
  return out;
}

}  // namespace iqcrate
