#pragma once

#include "iqcrate/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iqcrate {

/// Slope bounds m <= (phi(a) - phi(b)) / (a - b) <= L.
struct SectorBounds {
  double m = 0.0;
  double L = 1.0;

  SectorBounds() = default;
  SectorBounds(double lower, double upper);

  /// The loop-transformation matrix E = [[1, -1/L], [-m, 1]].
  [[nodiscard]] Eigen::Matrix2d transform() const;
};

/// FIR Zames-Falb multiplier with taps m_{-n}, ..., m_{n}.
class ZamesFalbFir {
 public:
  ZamesFalbFir() : taps_(1, 1.0) {}
  explicit ZamesFalbFir(std::vector<double> taps);  // size 2n+1, centered

  static ZamesFalbFir identity() { return ZamesFalbFir(); }

  [[nodiscard]] int half_order() const noexcept { return static_cast<int>(taps_.size() / 2); }
  [[nodiscard]] double tap(int i) const;  // 0 outside [-n, n]
  [[nodiscard]] const std::vector<double>& taps() const noexcept { return taps_; }

  /// Same multiplier with zero taps appended on both sides up to `n`.
  [[nodiscard]] ZamesFalbFir padded(int n) const;

 private:
  std::vector<double> taps_;
};

/// Relative slack allowed in sign and window-sum tests.
inline constexpr double kValidityTolerance = 1e-12;

enum class ViolationKind { PositiveOffCenterTap, WindowSumPlus, WindowSumMinus };

struct Violation {
  ViolationKind kind;
  int index = 0;  // tap index for sign violations, window half-width K otherwise
  double value = 0.0;

  [[nodiscard]] std::string describe() const;
};

struct RhoValidity {
  bool valid = true;
  std::optional<Violation> first_violation;
};

/// Sign constraints m_i <= 0 (i != 0) and, for K = 0..n,
/// sum_{|i|<=K} m_i rho^i >= 0 and sum_{|i|<=K} m_i rho^{-i} >= 0.
RhoValidity check_rho_validity(const ZamesFalbFir& zf, double rho);

/// M(e^{jw}) = sum_i m_i e^{-jwi}.
Complex eval_multiplier(const ZamesFalbFir& zf, double omega);

/// E^T [[0, conj(M)], [M, 0]] E (Kronecker I_p for p > 1). Requires L > 0.
CMatrix assemble_pi(const ZamesFalbFir& zf, const SectorBounds& sector, double omega, int p = 1);

/// Static gain multiplier diag(g^2 I_p, -I_p): nonnegative on graphs with gain <= g.
struct StaticGainPi {
  double g = 1.0;

  explicit StaticGainPi(double gain);
  [[nodiscard]] Matrix matrix(int p = 1) const;
};

Matrix static_gain_pi(double g, int p = 1);

struct WindowViolation {
  bool is_row = true;
  int line = 0;        // row or column index in the window
  int truncation = 0;  // leading principal block size
  double value = 0.0;  // offending partial sum (or entry)
  bool sign_violation = false;
};

struct HyperdominanceReport {
  bool doubly_hyperdominant = true;
  std::optional<WindowViolation> violation;
};

/// Builds the W x W matrix with entries rho^{-i-j} m_{i-j} (i, j = 0..W-1)
/// and checks the off-diagonal signs plus every row and column sum of every
/// leading principal truncation. Requires W >= 2n+1.
HyperdominanceReport check_doubly_hyperdominant_window(const ZamesFalbFir& zf, double rho, int window);

/// The weighted window matrix itself (exposed for tests and diagnostics).
Matrix weighted_window_matrix(const ZamesFalbFir& zf, double rho, int window);

}  // namespace iqcrate
