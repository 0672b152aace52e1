#pragma once

#include "iqcrate/types.hpp"

#include <string>
#include <vector>

namespace iqcrate {

/// Discrete-time realization G(z) = C (zI - A)^{-1} B + D.
///
/// A zero-state system (n = 0) is the static gain D. Realizations are assumed
/// minimal; nothing here checks controllability or observability.
class StateSpace {
 public:
  StateSpace(Matrix A, Matrix B, Matrix C, Matrix D);

  /// Static gain with no state.
  static StateSpace static_gain(const Matrix& D);

  [[nodiscard]] const Matrix& A() const noexcept { return A_; }
  [[nodiscard]] const Matrix& B() const noexcept { return B_; }
  [[nodiscard]] const Matrix& C() const noexcept { return C_; }
  [[nodiscard]] const Matrix& D() const noexcept { return D_; }

  [[nodiscard]] Eigen::Index states() const noexcept { return A_.rows(); }
  [[nodiscard]] Eigen::Index inputs() const noexcept { return B_.cols(); }
  [[nodiscard]] Eigen::Index outputs() const noexcept { return C_.rows(); }

  [[nodiscard]] bool strictly_proper(double tol = 0.0) const;

 private:
  Matrix A_, B_, C_, D_;
};

/// One-sided sampled signal; column k is the sample at time k.
class Signal {
 public:
  Signal() = default;
  explicit Signal(Matrix samples);

  static Signal zeros(Eigen::Index dim, Eigen::Index length);
  static Signal scalar(const std::vector<double>& values);

  [[nodiscard]] Eigen::Index dim() const noexcept { return samples_.rows(); }
  [[nodiscard]] Eigen::Index length() const noexcept { return samples_.cols(); }
  [[nodiscard]] Vector at(Eigen::Index k) const { return samples_.col(k); }
  [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index k) const { return samples_(i, k); }
  [[nodiscard]] const Matrix& samples() const noexcept { return samples_; }

  /// Euclidean norm of sample k.
  [[nodiscard]] double sample_norm(Eigen::Index k) const { return samples_.col(k).norm(); }
  /// l2 norm over the whole horizon.
  [[nodiscard]] double norm() const { return samples_.norm(); }

 private:
  Matrix samples_;
};

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(double s, const Signal& a);

/// Frequencies in [0, pi], strictly increasing, containing both endpoints.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> points);

  /// `count` uniformly spaced points including 0 and pi (count >= 2).
  static FrequencyGrid uniform(std::size_t count);

  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

/// C (e^{jw} I - A)^{-1} B + D via one complex LU solve.
/// Throws SingularResolvent when the resolvent pivot collapses (pole near e^{jw}).
CMatrix freq_response(const StateSpace& ss, double omega);

/// Same, at an arbitrary complex point z.
CMatrix eval_at(const StateSpace& ss, Complex z);

enum class SchurStatus { Certified, NotPositiveDefinite, IllConditioned };

struct SchurReport {
  bool schur = false;
  SchurStatus status = SchurStatus::IllConditioned;
  double min_pivot_ratio = 0.0;  // from the Cholesky of the Lyapunov solution
  double residual = 0.0;         // ||A'PA - P + I||
};

/// Schur stability via solvability of A'PA - P = -I with P > 0.
SchurReport is_schur(const Matrix& A);

/// r(A) < rho, decided as is_schur(A / rho).
bool spectral_radius_below(const Matrix& A, double rho);

/// Forced response from x0: x_{k+1} = A x_k + B u_k, y_k = C x_k + D u_k.
Signal simulate(const StateSpace& ss, const Signal& u, const Vector& x0);
Signal simulate(const StateSpace& ss, const Signal& u);

/// Solves A'PA - P = -Q via the Kronecker-vectorized system.
/// Throws SingularSylvester if some eigenvalue product lambda_i lambda_j is ~1.
Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& Q);

/// Vertical stacking [top; bottom] of two systems driven by the same input
/// and sharing one realization of the state.
StateSpace stack_outputs(const StateSpace& shared, const Matrix& C_bottom, const Matrix& D_bottom);

}  // namespace iqcrate
