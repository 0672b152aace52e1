#include "iqcrate/lmi.hpp"

#include "iqcrate/linalg.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace iqcrate {

CMatrix PsiFactorization::evaluate(double omega) const {
  const Eigen::Index k = channels();
  CMatrix psi(states() + k, k);
  if (states() > 0) {
    const CMatrix R = Complex(std::cos(omega), std::sin(omega)) * CMatrix::Identity(states(), states()) -
                      A.cast<Complex>();
    psi.topRows(states()) = R.partialPivLu().solve(B.cast<Complex>());
  }
  psi.bottomRows(k) = CMatrix::Identity(k, k);
  return psi.adjoint() * M.cast<Complex>() * psi;
}

PsiFactorization psi_factorize_fir(const ZamesFalbFir& zf, const SectorBounds& sector, int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "psi_factorize_fir: p must be >= 1");
  const int n = zf.half_order();
  const Eigen::Matrix2d E = sector.transform();
  const Eigen::RowVector2d Ea = E.row(0);
  const Eigen::RowVector2d Eb = E.row(1);

  // State order: a-chain x_a(1..n), b-chain x_b(1..n); x_a(k) = z^{-k} a.
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  Matrix B = Matrix::Zero(2 * n, 2);
  for (int k = 1; k < n; ++k) {
    A(k, k - 1) = 1.0;
    A(n + k, n + k - 1) = 1.0;
  }
  if (n > 0) {
    B.row(0) = Ea;
    B.row(n) = Eb;
  }

  Matrix M = Matrix::Zero(2 * n + 2, 2 * n + 2);
  const Eigen::Index io = 2 * n;  // offset of the [y; u] block
  M.block(io, io, 2, 2) = zf.tap(0) * (Ea.transpose() * Eb + Eb.transpose() * Ea);
  for (int k = 1; k <= n; ++k) {
    M.block(k - 1, io, 1, 2) = zf.tap(k) * Eb;
    M.block(n + k - 1, io, 1, 2) = zf.tap(-k) * Ea;
  }
  M.bottomLeftCorner(2, 2 * n) = M.topRightCorner(2 * n, 2).transpose();

  if (p == 1) return {A, B, M};
  const Matrix I = Matrix::Identity(p, p);
  return {linalg::kron(A, I), linalg::kron(B, I), linalg::kron(M, I)};
}

PsiFactorization psi_static(const Matrix& pi) {
  if (pi.rows() != pi.cols()) throw Error(ErrorCode::DimensionMismatch, "static multiplier must be square");
  return {Matrix(0, 0), Matrix(0, pi.cols()), 0.5 * (pi + pi.transpose())};
}

Matrix KypLmi::constant_term() const {
  Matrix CD(C.rows(), C.cols() + D.cols());
  CD << C, D;
  Matrix out = CD.transpose() * M * CD;
  return 0.5 * (out + out.transpose());
}

Matrix KypLmi::linear_term(const Matrix& P) const {
  if (P.rows() != states() || P.cols() != states())
    throw Error(ErrorCode::DimensionMismatch, "P must be " + std::to_string(states()) + " square");
  Matrix AB(A.rows(), A.cols() + B.cols());
  AB << A, B;
  Matrix out = AB.transpose() * P * AB;
  out.topLeftCorner(states(), states()) -= P;
  return 0.5 * (out + out.transpose());
}

CMatrix KypLmi::transfer_form(double omega) const {
  const Eigen::Index n = states();
  CMatrix v(dim(), inputs());
  const CMatrix R = Complex(std::cos(omega), std::sin(omega)) * CMatrix::Identity(n, n) - A.cast<Complex>();
  v.topRows(n) = R.partialPivLu().solve(B.cast<Complex>());
  v.bottomRows(inputs()) = CMatrix::Identity(inputs(), inputs());
  return v.adjoint() * constant_term().cast<Complex>() * v;
}

KypLmi build_kyp_lmi(const StateSpace& G, const Matrix& F, Rate rho, const PsiFactorization& fact) {
  const Eigen::Index n = G.states();
  const Eigen::Index m = G.inputs();
  const Eigen::Index p = G.outputs();
  if (F.rows() != m || F.cols() != n) throw Error(ErrorCode::DimensionMismatch, "F must be inputs x states");
  if (fact.channels() != p + m)
    throw Error(ErrorCode::DimensionMismatch, "multiplier acts on " + std::to_string(fact.channels()) +
                                                  " channels, plant graph has " + std::to_string(p + m));
  const double r = rho.value();
  Matrix Cnm(p + m, n);
  Cnm << G.C() + G.D() * F, F;
  Matrix Dnm(p + m, m);
  Dnm << G.D(), Matrix::Identity(m, m);
  const Eigen::Index np = fact.states();

  KypLmi lmi;
  lmi.A = Matrix::Zero(np + n, np + n);
  lmi.A.topLeftCorner(np, np) = fact.A;
  lmi.A.topRightCorner(np, n) = fact.B * Cnm;
  lmi.A.bottomRightCorner(n, n) = (G.A() + G.B() * F) / r;
  lmi.B = Matrix::Zero(np + n, m);
  lmi.B.topRows(np) = fact.B * Dnm;
  lmi.B.bottomRows(n) = G.B() / r;
  lmi.C = Matrix::Zero(np + p + m, np + n);
  lmi.C.topLeftCorner(np, np) = Matrix::Identity(np, np);
  lmi.C.bottomRightCorner(p + m, n) = Cnm;
  lmi.D = Matrix::Zero(np + p + m, m);
  lmi.D.bottomRows(p + m) = Dnm;
  lmi.M = fact.M;
  return lmi;
}

KypLmi build_kyp_lmi(const StateSpace& G, const CoprimePair& pair, const PsiFactorization& fact) {
  return build_kyp_lmi(G, pair.F, Rate(pair.rho), fact);
}

double verify_candidate_p(const KypLmi& lmi, const Matrix& P) {
  return linalg::lambda_max_symmetric(lmi.assemble(P));
}

SubgradientResult search_p_subgradient(const KypLmi& lmi, const SubgradientOptions& opts) {
  if (lmi.dim() > kSubgradientDimensionGuard)
    throw Error(ErrorCode::DimensionGuard, "subgradient search is limited to " +
                                               std::to_string(kSubgradientDimensionGuard) + " dimensions, got " +
                                               std::to_string(lmi.dim()));
  const Eigen::Index n = lmi.states();
  Matrix AB(lmi.A.rows(), lmi.A.cols() + lmi.B.cols());
  AB << lmi.A, lmi.B;
  const Matrix theta = lmi.constant_term();

  auto top = [&](const Matrix& P, Vector& vec) {
    const linalg::SymmetricEigen eig = linalg::jacobi_eigen(theta + lmi.linear_term(P));
    const Eigen::Index last = eig.values.size() - 1;
    vec = eig.vectors.col(last);
    return eig.values(last);
  };

  SubgradientResult out;
  Matrix P = Matrix::Zero(n, n);
  Vector v;
  double f = top(P, v);
  out.P = P;
  out.lambda_max = out.initial_lambda_max = f;
  if (n == 0 || opts.iterations <= 0) return out;

  // Subgradient of lambda_max at P: [A B] v v' [A B]' - v_x v_x'.
  auto subgradient = [&](const Vector& vec) {
    const Vector Av = AB * vec;
    const Vector vx = vec.head(n);
    return Matrix(Av * Av.transpose() - vx * vx.transpose());
  };
  Matrix G = subgradient(v);
  // c is calibrated so the first step moves lambda_max by about |f| to first
  // order. The c / sqrt(k) schedule restarts from the best iterate with c
  // halved whenever an epoch brings no improvement.
  const double g0 = G.norm();
  double c = opts.step_scale * (g0 > 0.0 ? std::max(std::abs(f), 1e-3) / g0 : 1.0);
  int k = 0;
  double epoch_start_best = out.lambda_max;
  for (int it = 1; it <= opts.iterations; ++it) {
    const double gn = G.norm();
    if (gn == 0.0) break;
    ++k;
    P -= (c / std::sqrt(static_cast<double>(k))) * (G / gn);
    P = 0.5 * (P + P.transpose());
    f = top(P, v);
    out.iterations = it;
    if (f < out.lambda_max) {
      out.lambda_max = f;
      out.P = P;
    }
    if (out.lambda_max <= opts.stop_below) break;
    if (k == opts.epoch) {
      if (out.lambda_max >= epoch_start_best) c *= 0.5;
      epoch_start_best = out.lambda_max;
      P = out.P;
      top(P, v);
      k = 0;
    }
    G = subgradient(v);
  }
  return out;
}

}  // namespace iqcrate
