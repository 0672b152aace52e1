#include "iqcrate/lti.hpp"

#include "iqcrate/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace iqcrate {

StateSpace::StateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const auto n = A_.rows();
  if (A_.cols() != n || B_.rows() != n || C_.cols() != n || D_.rows() != C_.rows() ||
      D_.cols() != B_.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "state-space blocks inconsistent: A " + std::to_string(A_.rows()) + "x" +
                    std::to_string(A_.cols()) + ", B " + std::to_string(B_.rows()) + "x" +
                    std::to_string(B_.cols()) + ", C " + std::to_string(C_.rows()) + "x" +
                    std::to_string(C_.cols()) + ", D " + std::to_string(D_.rows()) + "x" +
                    std::to_string(D_.cols()));
  }
}

StateSpace StateSpace::static_gain(const Matrix& D) {
  return StateSpace(Matrix(0, 0), Matrix(0, D.cols()), Matrix(D.rows(), 0), D);
}

bool StateSpace::strictly_proper(double tol) const {
  return D_.size() == 0 || D_.cwiseAbs().maxCoeff() <= tol;
}

Signal::Signal(Matrix samples) : samples_(std::move(samples)) {}

Signal Signal::zeros(Eigen::Index dim, Eigen::Index length) {
  if (dim <= 0) throw Error(ErrorCode::InvalidArgument, "signal dimension must be positive");
  return Signal(Matrix::Zero(dim, length));
}

Signal Signal::scalar(const std::vector<double>& values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) m(0, static_cast<Eigen::Index>(k)) = values[k];
  return Signal(std::move(m));
}

namespace {
void require_same_shape(const Signal& a, const Signal& b) {
  if (a.dim() != b.dim() || a.length() != b.length())
    throw Error(ErrorCode::DimensionMismatch, "signals differ in shape");
}
}  // namespace

Signal operator+(const Signal& a, const Signal& b) {
  require_same_shape(a, b);
  return Signal(a.samples() + b.samples());
}

Signal operator-(const Signal& a, const Signal& b) {
  require_same_shape(a, b);
  return Signal(a.samples() - b.samples());
}

Signal operator*(double s, const Signal& a) { return Signal(s * a.samples()); }

FrequencyGrid::FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw Error(ErrorCode::InvalidArgument, "frequency grid needs >= 2 points");
  if (points_.front() != 0.0 || points_.back() != kPi)
    throw Error(ErrorCode::InvalidArgument, "frequency grid must start at 0 and end at pi");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "frequency grid must be strictly increasing");
  }
}

FrequencyGrid FrequencyGrid::uniform(std::size_t count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "uniform grid needs >= 2 points");
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i)
    pts[i] = kPi * static_cast<double>(i) / static_cast<double>(count - 1);
  pts.back() = kPi;
  return FrequencyGrid(std::move(pts));
}

CMatrix eval_at(const StateSpace& ss, Complex z) {
  const auto n = ss.states();
  CMatrix out = ss.D().cast<Complex>();
  if (n == 0) return out;
  CMatrix resolvent = -ss.A().cast<Complex>();
  resolvent.diagonal().array() += z;
  auto x = linalg::solve_checked(resolvent, ss.B().cast<Complex>());
  if (!x) {
    throw Error(ErrorCode::SingularResolvent,
                "zI - A is numerically singular at z = (" + std::to_string(z.real()) + ", " +
                    std::to_string(z.imag()) + ")");
  }
  out.noalias() += ss.C().cast<Complex>() * (*x);
  return out;
}

CMatrix freq_response(const StateSpace& ss, double omega) {
  return eval_at(ss, std::polar(1.0, omega));
}

namespace {

// Kronecker form of A'PA - P = -Q: (A' (x) A' - I) vec(P) = -vec(Q).
std::optional<Matrix> lyapunov_kron(const Matrix& A, const Matrix& Q) {
  const auto n = A.rows();
  const Matrix At = A.transpose();
  Matrix K = linalg::kron(At, At);
  K.diagonal().array() -= 1.0;
  const Vector rhs = -Eigen::Map<const Vector>(Q.data(), n * n);
  auto sol = linalg::solve_checked(K, Matrix(rhs));
  if (!sol) return std::nullopt;
  Matrix P = Eigen::Map<const Matrix>(sol->data(), n, n);
  return Matrix(0.5 * (P + P.transpose()));
}

}  // namespace

SchurReport is_schur(const Matrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "is_schur: A not square");
  SchurReport report;
  const auto n = A.rows();
  if (n == 0) {
    report.schur = true;
    report.status = SchurStatus::Certified;
    report.min_pivot_ratio = 1.0;
    return report;
  }
  const Matrix I = Matrix::Identity(n, n);
  auto P = lyapunov_kron(A, I);
  if (!P) {
    report.status = SchurStatus::IllConditioned;
    return report;
  }
  report.residual = (A.transpose() * (*P) * A - *P + I).norm();
  const auto chol = linalg::cholesky_check(*P);
  report.min_pivot_ratio = chol.min_pivot_ratio;
  report.schur = chol.positive_definite;
  report.status = chol.positive_definite ? SchurStatus::Certified : SchurStatus::NotPositiveDefinite;
  return report;
}

bool spectral_radius_below(const Matrix& A, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectral_radius_below: rho must be > 0");
  return is_schur(A / rho).schur;
}

Signal simulate(const StateSpace& ss, const Signal& u, const Vector& x0) {
  if (u.dim() != ss.inputs())
    throw Error(ErrorCode::DimensionMismatch, "simulate: input dimension " + std::to_string(u.dim()) +
                                                  " != " + std::to_string(ss.inputs()));
  if (x0.size() != ss.states())
    throw Error(ErrorCode::DimensionMismatch, "simulate: x0 length " + std::to_string(x0.size()) +
                                                  " != " + std::to_string(ss.states()));
  Matrix y(ss.outputs(), u.length());
  Vector x = x0;
  for (Eigen::Index k = 0; k < u.length(); ++k) {
    const auto uk = u.samples().col(k);
    y.col(k).noalias() = ss.C() * x + ss.D() * uk;
    Vector next = ss.A() * x + ss.B() * uk;
    x.swap(next);
  }
  return Signal(std::move(y));
}

Signal simulate(const StateSpace& ss, const Signal& u) {
  return simulate(ss, u, Vector::Zero(ss.states()));
}

Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& Q) {
  if (A.rows() != A.cols() || Q.rows() != A.rows() || Q.cols() != A.cols())
    throw Error(ErrorCode::DimensionMismatch, "solve_discrete_lyapunov: shape mismatch");
  if (A.rows() == 0) return Matrix(0, 0);
  auto P = lyapunov_kron(A, Q);
  if (!P) throw Error(ErrorCode::SingularSylvester, "eigenvalue product of A is numerically 1");
  return *P;
}

StateSpace stack_outputs(const StateSpace& shared, const Matrix& C_bottom, const Matrix& D_bottom) {
  Matrix C(shared.outputs() + C_bottom.rows(), shared.states());
  C << shared.C(), C_bottom;
  Matrix D(shared.outputs() + D_bottom.rows(), shared.inputs());
  D << shared.D(), D_bottom;
  return StateSpace(shared.A(), shared.B(), std::move(C), std::move(D));
}

}  // namespace iqcrate
