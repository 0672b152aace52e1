#pragma once

#include "iqcrate/lti.hpp"

namespace iqcrate {

struct RiccatiOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;  // relative change of successive P
};

/// F such that (A + B F) / rho is Schur. Returns F = 0 when A / rho already is.
/// Otherwise runs discrete Riccati value iteration on (A/rho, B/rho) with
/// Q = I, R = I. Throws NotStabilizable on non-convergence or a failed
/// closed-loop Schur test.
Matrix stabilizing_gain(const Matrix& A, const Matrix& B, double rho, const RiccatiOptions& opts = {});

/// Right coprime factors of G_rho from state feedback:
///   [N; M] = [C + D F; F] (zI - (A + B F)/rho)^{-1} (B/rho) + [D; I].
struct CoprimePair {
  StateSpace N;
  StateSpace M;
  Matrix F;
  double rho = 1.0;

  /// [N; M] as one system sharing the factor state.
  [[nodiscard]] StateSpace stacked() const;
};

CoprimePair rcf(const StateSpace& ss, Rate rho, const RiccatiOptions& opts = {});

/// Max relative error of N M^{-1} against G_rho over the grid.
/// Throws SingularM when M(e^{jw}) is singular at a grid point.
double rcf_identity_error(const CoprimePair& pair, const StateSpace& ss, const FrequencyGrid& grid);

}  // namespace iqcrate
