#pragma once

#include "iqcrate/factorization.hpp"
#include "iqcrate/fdi.hpp"
#include "iqcrate/lp.hpp"
#include "iqcrate/multipliers.hpp"

#include <optional>
#include <string>

namespace iqcrate {

enum class Normalization { CenterTap };  // m_0 = 1

struct SynthesisConfig {
  int half_order = 5;
  std::size_t grid_points = 1024;
  double epsilon = kDefaultMarginEpsilon;
  Normalization normalization = Normalization::CenterTap;
  int refine_factor = 8;  // for the independent re-check; <= 1 disables
  unsigned threads = 1;

  void validate() const;
};

struct SynthesisResult {
  bool feasible = false;
  std::optional<ZamesFalbFir> multiplier;
  LpStatus lp_status = LpStatus::NumericalFailure;
  double lp_objective = 0.0;  // t*: max over the grid of Phi at the LP optimum
  FdiReport recheck;          // independent FDI check of the returned taps
  std::string diagnosis;
};

/// Coefficients of Phi(w) = sum_i m_i c_i(w) for a SISO pair:
/// c_i(w) = 2 Re(e^{-jwi} a conj(b)) with [a; b] = E [N; M].
/// Returned as a (2n+1)-vector ordered m_{-n}..m_{n}.
Vector fdi_tap_coefficients(const StateSpace& stacked_pair, const SectorBounds& sector, int half_order, double omega);

/// LP search for a rho-valid FIR multiplier with m_0 = 1 making the grid FDI
/// hold with margin at least epsilon. The taps are then re-checked by
/// check_rho_validity and a refined fdi_margin; failure of either makes the
/// result infeasible. Throws LpNumericalFailure when the simplex hits its cap.
SynthesisResult synthesize_multiplier(const CoprimePair& pair, const SectorBounds& sector, Rate rho,
                                      const SynthesisConfig& cfg = {});

}  // namespace iqcrate
