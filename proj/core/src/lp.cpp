#include "iqcrate/lp.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace iqcrate {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationCap: return "iteration_cap";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

enum class PhaseOutcome { Optimal, Unbounded, IterationCap };

// Dense tableau for min cost'y s.t. E y = f (f >= 0), y >= 0, with one
// artificial column per row appended after the structural columns.
struct Tableau {
  int rows = 0;
  int structural = 0;
  Matrix base;             // original [E | I | f] after row sign flips
  Matrix T;                // current B^{-1} base
  std::vector<int> basis;  // column index basic in each row

  [[nodiscard]] int cols() const { return structural + rows; }
  [[nodiscard]] int rhs() const { return structural + rows; }

  void pivot(int r, int col) {
    T.row(r) /= T(r, col);
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    basis[static_cast<std::size_t>(r)] = col;
  }

  // Recomputes the tableau from the original data to shed pivot roundoff.
  void reinvert() {
    Matrix B(rows, rows);
    for (int i = 0; i < rows; ++i) B.col(i) = base.col(basis[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Matrix> lu(B);
    T = lu.solve(base);
  }
};

constexpr int kReinvertEvery = 50;
constexpr int kDegenerateStreak = 25;

// Dantzig pricing; after a run of degenerate pivots it falls back to Bland's
// rule (lowest-index entering column, lowest basic index among tied rows)
// until progress resumes, which rules out cycling.
PhaseOutcome run_phase(Tableau& tab, const Vector& cost, int allowed_cols, const LpOptions& opts, int& iterations) {
  const double tol = opts.pivot_tolerance;
  int degenerate = 0;
  int since_reinvert = 0;
  std::vector<char> is_basic(static_cast<std::size_t>(tab.cols()), 0);
  while (true) {
    if (iterations >= opts.max_iterations) return PhaseOutcome::IterationCap;
    std::fill(is_basic.begin(), is_basic.end(), 0);
    Vector duals(tab.rows);
    for (int i = 0; i < tab.rows; ++i) {
      const int b = tab.basis[static_cast<std::size_t>(i)];
      duals(i) = cost(b);
      is_basic[static_cast<std::size_t>(b)] = 1;
    }
    const bool bland = degenerate >= kDegenerateStreak;
    const Vector reduced = cost.head(allowed_cols).transpose() - duals.transpose() * tab.T.leftCols(allowed_cols);

    int entering = -1;
    double most_negative = -tol;
    for (int j = 0; j < allowed_cols; ++j) {
      if (is_basic[static_cast<std::size_t>(j)] || reduced(j) >= -tol) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (reduced(j) < most_negative) {
        most_negative = reduced(j);
        entering = j;
      }
    }
    if (entering < 0) {
      if (since_reinvert == 0) return PhaseOutcome::Optimal;
      tab.reinvert();  // confirm optimality on fresh data
      since_reinvert = 0;
      continue;
    }

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.rows; ++i) {
      const double a = tab.T(i, entering);
      if (a <= tol) continue;
      const double ratio = std::max(0.0, tab.T(i, tab.rhs())) / a;
      const double slack = 1e-12 * std::max(1.0, std::abs(ratio));
      if (leaving < 0 || ratio < best_ratio - slack ||
          (ratio <= best_ratio + slack &&
           tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leaving)])) {
        best_ratio = ratio;
        leaving = i;
      }
    }
    if (leaving < 0) return PhaseOutcome::Unbounded;
    degenerate = best_ratio <= 1e-14 ? degenerate + 1 : 0;
    tab.pivot(leaving, entering);
    ++iterations;
    if (++since_reinvert >= kReinvertEvery) {
      tab.reinvert();
      since_reinvert = 0;
    }
  }
}

struct StandardSolve {
  PhaseOutcome outcome = PhaseOutcome::Optimal;
  bool feasible = false;
  Tableau tab;
  std::vector<double> row_sign;
};

// min cost'y s.t. E y = f, y >= 0.
StandardSolve solve_standard(const Matrix& E, const Vector& f, const Vector& cost, const LpOptions& opts,
                             int& iterations) {
  StandardSolve out;
  Tableau& tab = out.tab;
  tab.rows = static_cast<int>(E.rows());
  tab.structural = static_cast<int>(E.cols());
  tab.base = Matrix::Zero(tab.rows, tab.cols() + 1);
  out.row_sign.assign(static_cast<std::size_t>(tab.rows), 1.0);
  for (int i = 0; i < tab.rows; ++i) {
    const double s = f(i) < 0.0 ? -1.0 : 1.0;
    out.row_sign[static_cast<std::size_t>(i)] = s;
    tab.base.row(i).head(tab.structural) = s * E.row(i);
    tab.base(i, tab.structural + i) = 1.0;
    tab.base(i, tab.rhs()) = s * f(i);
  }
  tab.T = tab.base;
  tab.basis.resize(static_cast<std::size_t>(tab.rows));
  for (int i = 0; i < tab.rows; ++i) tab.basis[static_cast<std::size_t>(i)] = tab.structural + i;

  Vector phase1 = Vector::Zero(tab.cols());
  phase1.tail(tab.rows).setOnes();
  out.outcome = run_phase(tab, phase1, tab.cols(), opts, iterations);
  if (out.outcome == PhaseOutcome::IterationCap) return out;

  double infeasibility = 0.0;
  for (int i = 0; i < tab.rows; ++i)
    if (tab.basis[static_cast<std::size_t>(i)] >= tab.structural) infeasibility += tab.T(i, tab.rhs());
  const double fscale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if (infeasibility > opts.feasibility_tolerance * fscale) {
    out.feasible = false;
    return out;
  }
  out.feasible = true;

  // Drive remaining artificials out of the basis where a structural pivot exists.
  for (int i = 0; i < tab.rows; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < tab.structural) continue;
    int col = -1;
    double best = opts.pivot_tolerance;
    for (int j = 0; j < tab.structural; ++j) {
      if (std::abs(tab.T(i, j)) > best) {
        best = std::abs(tab.T(i, j));
        col = j;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }

  Vector phase2 = Vector::Zero(tab.cols());
  phase2.head(tab.structural) = cost;
  out.outcome = run_phase(tab, phase2, tab.structural, opts, iterations);
  return out;
}

}  // namespace

LpResult lp_solve(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& opts) {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw Error(ErrorCode::DimensionMismatch, "lp_solve: A, b, c sizes disagree");
  LpResult result;
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (n == 0) {
    result.status = (m == 0 || b.minCoeff() >= 0.0) ? LpStatus::Optimal : LpStatus::Infeasible;
    result.x = Vector(0);
    return result;
  }

  // Row equilibration leaves x unchanged and keeps the tableau well scaled.
  Matrix As = A;
  Vector bs = b;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      As.row(i) /= s;
      bs(i) /= s;
    }
  }

  const Matrix E = As.transpose();  // n x m
  const Vector f = -c;
  StandardSolve dual = solve_standard(E, f, bs, opts, result.iterations);
  if (dual.outcome == PhaseOutcome::IterationCap) {
    result.status = LpStatus::IterationCap;
    return result;
  }
  if (!dual.feasible) {
    // Dual infeasible: the primal is unbounded when feasible, else infeasible.
    // Feasibility follows from boundedness of min b'y over A'y = 0, y >= 0.
    StandardSolve ray = solve_standard(E, Vector::Zero(n), bs, opts, result.iterations);
    if (ray.outcome == PhaseOutcome::IterationCap) {
      result.status = LpStatus::IterationCap;
    } else {
      result.status = ray.outcome == PhaseOutcome::Unbounded ? LpStatus::Infeasible : LpStatus::Unbounded;
    }
    return result;
  }
  if (dual.outcome == PhaseOutcome::Unbounded) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Simplex multipliers pi solve B' pi = cost_B; undo the row sign flips.
  const Tableau& tab = dual.tab;
  Matrix Bmat(n, n);
  Vector cb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int col = tab.basis[static_cast<std::size_t>(i)];
    if (col < tab.structural) {
      for (Eigen::Index r = 0; r < n; ++r) Bmat(r, i) = dual.row_sign[static_cast<std::size_t>(r)] * E(r, col);
      cb(i) = bs(col);
    } else {
      Bmat.col(i).setZero();
      Bmat(col - tab.structural, i) = 1.0;
      cb(i) = 0.0;
    }
  }
  const Vector pi = Bmat.transpose().completeOrthogonalDecomposition().solve(cb);
  Vector x(n);
  for (Eigen::Index r = 0; r < n; ++r) x(r) = dual.row_sign[static_cast<std::size_t>(r)] * pi(r);

  const double scale = std::max({1.0, b.cwiseAbs().maxCoeff(), A.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff()});
  const double viol = (A * x - b).maxCoeff();
  result.residual = std::max(0.0, viol) / scale;
  result.x = x;
  result.objective = c.dot(x);
  result.status = result.residual <= opts.feasibility_tolerance ? LpStatus::Optimal : LpStatus::NumericalFailure;
  return result;
}

}  // namespace iqcrate
