#pragma once

#include "iqcrate/types.hpp"

#include <string_view>

namespace iqcrate {

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationCap, NumericalFailure };

std::string_view to_string(LpStatus status);

struct LpOptions {
  int max_iterations = 200000;
  double pivot_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;  // relative to the data scale
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  Vector x;                 // valid when Optimal
  double objective = 0.0;   // c'x when Optimal
  double residual = 0.0;    // max(A x - b)_+ relative to scale
  int iterations = 0;
};

/// min c'x subject to A x <= b with x free.
///
/// Works on the dual standard form min b'y s.t. A'y = -c, y >= 0, which has
/// one row per primal variable; grid-constrained LPs have many constraints
/// and few variables, so the tableau stays narrow. Two-phase dense simplex
/// with Dantzig pricing; a run of degenerate pivots switches to Bland's rule
/// until the objective moves again. The primal solution is read off the final simplex
/// multipliers and checked against A x <= b.
LpResult lp_solve(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& opts = {});

}  // namespace iqcrate
