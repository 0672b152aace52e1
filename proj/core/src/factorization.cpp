#include "iqcrate/factorization.hpp"

#include "iqcrate/linalg.hpp"
#include "iqcrate/weighting.hpp"

#include <algorithm>
#include <cmath>

namespace iqcrate {

Matrix stabilizing_gain(const Matrix& A, const Matrix& B, double rho, const RiccatiOptions& opts) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "stabilizing_gain: A and B disagree");
  const Rate r(rho);
  const auto n = A.rows();
  const auto m = B.cols();
  if (n == 0 || spectral_radius_below(A, r.value())) return Matrix::Zero(m, n);

  const Matrix As = A / r.value();
  const Matrix Bs = B / r.value();
  const Matrix Q = Matrix::Identity(n, n);
  const Matrix R = Matrix::Identity(m, m);

  Matrix P = Q;
  Matrix F = Matrix::Zero(m, n);
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix BtP = Bs.transpose() * P;
    const Matrix S = R + BtP * Bs;
    auto gain = linalg::solve_checked(S, BtP * As);
    if (!gain) throw Error(ErrorCode::NotStabilizable, "R + B'PB became singular during Riccati iteration");
    F = -*gain;
    Matrix next = Q + As.transpose() * P * As + As.transpose() * P * Bs * F;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) break;
    const double change = (next - P).norm();
    P.swap(next);
    if (change < opts.tolerance * std::max(1.0, P.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NotStabilizable, "Riccati iteration did not converge");

  {
    const Matrix BtP = Bs.transpose() * P;
    auto gain = linalg::solve_checked(Matrix(R + BtP * Bs), Matrix(BtP * As));
    if (!gain) throw Error(ErrorCode::NotStabilizable, "final gain solve is singular");
    F = -*gain;
  }
  if (!is_schur(As + Bs * F).schur)
    throw Error(ErrorCode::NotStabilizable, "Riccati gain does not stabilize (A + BF)/rho");
  return F;
}

StateSpace CoprimePair::stacked() const {
  Matrix C(N.outputs() + M.outputs(), N.states());
  C << N.C(), M.C();
  Matrix D(N.outputs() + M.outputs(), N.inputs());
  D << N.D(), M.D();
  return StateSpace(N.A(), N.B(), std::move(C), std::move(D));
}

CoprimePair rcf(const StateSpace& ss, Rate rho, const RiccatiOptions& opts) {
  const Matrix F = stabilizing_gain(ss.A(), ss.B(), rho.value(), opts);
  const double inv = 1.0 / rho.value();
  const Matrix Af = (ss.A() + ss.B() * F) * inv;
  const Matrix Bf = ss.B() * inv;
  const auto m = ss.inputs();
  StateSpace N(Af, Bf, ss.C() + ss.D() * F, ss.D());
  StateSpace M(Af, Bf, F, Matrix::Identity(m, m));
  return CoprimePair{std::move(N), std::move(M), F, rho.value()};
}

double rcf_identity_error(const CoprimePair& pair, const StateSpace& ss, const FrequencyGrid& grid) {
  const StateSpace scaled = scale_statespace(ss, Rate(pair.rho));
  double worst = 0.0;
  for (double w : grid.points()) {
    const CMatrix n = freq_response(pair.N, w);
    const CMatrix mm = freq_response(pair.M, w);
    auto minv = linalg::solve_checked(mm, CMatrix::Identity(mm.rows(), mm.cols()));
    if (!minv) throw Error(ErrorCode::SingularM, "M(e^{jw}) singular at w = " + std::to_string(w));
    const CMatrix ratio = n * (*minv);
    const CMatrix g = freq_response(scaled, w);
    const double scale = std::max(1.0, g.norm());
    worst = std::max(worst, (ratio - g).norm() / scale);
  }
  return worst;
}

}  // namespace iqcrate
