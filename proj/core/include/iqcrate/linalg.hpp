#pragma once

#include "iqcrate/types.hpp"

#include <optional>

namespace iqcrate::linalg {

/// Relative pivot threshold used by every LU-based solve.
inline constexpr double kPivotTolerance = 1e-12;

/// Solves A X = B with partial-pivot LU. Returns nullopt when the smallest
/// pivot falls below `rel_tol * max|A_ij|`.
std::optional<CMatrix> solve_checked(const CMatrix& A, const CMatrix& B,
                                     double rel_tol = kPivotTolerance);
std::optional<Matrix> solve_checked(const Matrix& A, const Matrix& B,
                                    double rel_tol = kPivotTolerance);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns, matching `values`
  int sweeps = 0;
};

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix.
SymmetricEigen jacobi_eigen(const Matrix& S, double tol = 1e-14, int max_sweeps = 100);

/// Largest eigenvalue of a real symmetric matrix.
double lambda_max_symmetric(const Matrix& S);

/// Largest eigenvalue of a complex Hermitian matrix. Closed form for
/// dimension <= 2; otherwise Jacobi on the real embedding [[Re,-Im],[Im,Re]].
double lambda_max_hermitian(const CMatrix& H);

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& M);

struct CholeskyReport {
  bool positive_definite = false;
  double min_pivot_ratio = 0.0;  // min_i L_ii^2 / trace
};

/// Cholesky with the acceptance rule pivot > threshold * trace(P).
CholeskyReport cholesky_check(const Matrix& P, double threshold = 1e-10);

/// Kronecker product.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace iqcrate::linalg
