#include "generators.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace gen {

using iqcrate::Matrix;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int integer(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Matrix matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = normal(rng);
  return M;
}

iqcrate::StateSpace stable_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p, double radius,
                                  bool strictly_proper) {
  Matrix A = matrix(rng, n, n);
  if (n > 0) {
    const double s = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    if (s > 0.0) A *= radius / s;
  }
  const Matrix D = strictly_proper ? Matrix::Zero(p, m) : matrix(rng, p, m);
  return {A, matrix(rng, n, m), matrix(rng, p, n), D};
}

iqcrate::StateSpace any_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p, double scale) {
  return {matrix(rng, n, n, scale), matrix(rng, n, m), matrix(rng, p, n), Matrix::Zero(p, m)};
}

namespace {

std::vector<double> off_center(Rng& rng, int n, double rho, double slack) {
  std::vector<double> taps(static_cast<std::size_t>(2 * n + 1), 0.0);
  double plus = 0.0, minus = 0.0;
  for (int i = -n; i <= n; ++i) {
    if (i == 0) continue;
    // Sparse-ish: some taps stay zero.
    const double u = uniform(rng, 0.0, 1.0) < 0.25 ? 0.0 : uniform(rng, 0.0, 1.0);
    taps[static_cast<std::size_t>(i + n)] = u;
    plus += u * std::pow(rho, i);
    minus += u * std::pow(rho, -i);
  }
  const double worst = std::max(plus, minus);
  for (int i = -n; i <= n; ++i) {
    double& t = taps[static_cast<std::size_t>(i + n)];
    t = worst > 0.0 ? -t * slack / worst : 0.0;
  }
  taps[static_cast<std::size_t>(n)] = 1.0;
  return taps;
}

}  // namespace

iqcrate::ZamesFalbFir valid_multiplier(Rng& rng, int n, double rho) {
  return iqcrate::ZamesFalbFir(off_center(rng, n, rho, uniform(rng, 0.0, 0.999)));
}

iqcrate::ZamesFalbFir invalid_multiplier(Rng& rng, int n, double rho, iqcrate::ViolationKind* kind) {
  n = std::max(n, 1);
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    std::vector<double> taps = off_center(rng, n, rho, uniform(rng, 0.0, 0.9));
    int i = integer(rng, 1, n);
    if (uniform(rng, 0.0, 1.0) < 0.5) i = -i;
    taps[static_cast<std::size_t>(i + n)] = uniform(rng, 0.01, 0.5);
    if (kind) *kind = iqcrate::ViolationKind::PositiveOffCenterTap;
    return iqcrate::ZamesFalbFir(std::move(taps));
  }
  // Some window sum ends up negative: overshoot the full-sum budget.
  std::vector<double> taps = off_center(rng, n, rho, 1.0);
  bool any = false;
  for (std::size_t i = 0; i < taps.size(); ++i)
    if (static_cast<int>(i) != n && taps[i] != 0.0) any = true;
  if (!any) taps[static_cast<std::size_t>(n + 1)] = -1.0;
  const double over = uniform(rng, 1.05, 3.0);
  for (std::size_t i = 0; i < taps.size(); ++i)
    if (static_cast<int>(i) != n) taps[i] *= over;
  if (kind) *kind = iqcrate::ViolationKind::WindowSumPlus;
  return iqcrate::ZamesFalbFir(std::move(taps));
}

iqcrate::PiecewiseLinear odd_piecewise_linear(Rng& rng, const iqcrate::SectorBounds& sector, int half_breakpoints) {
  std::vector<double> pos;
  for (int i = 0; i < half_breakpoints; ++i) pos.push_back(uniform(rng, 0.01, 10.0));
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::vector<double> right;  // slopes on [0, b1), [b1, b2), ..., [b_last, inf)
  for (std::size_t i = 0; i <= pos.size(); ++i) right.push_back(uniform(rng, sector.m, sector.L));
  iqcrate::PiecewiseLinear f;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) f.breakpoints.push_back(-*it);
  f.breakpoints.push_back(0.0);
  for (double b : pos) f.breakpoints.push_back(b);
  for (auto it = right.rbegin(); it != right.rend(); ++it) f.slopes.push_back(*it);
  for (double s : right) f.slopes.push_back(s);
  return f;
}

iqcrate::Signal signal(Rng& rng, Eigen::Index dim, Eigen::Index length, double scale) {
  return iqcrate::Signal(matrix(rng, dim, length, scale));
}

}  // namespace gen
