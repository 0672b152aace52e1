#include "iqcrate/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace iqcrate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::SingularSylvester: return "SingularSylvester";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotStabilizable: return "NotStabilizable";
    case ErrorCode::SingularM: return "SingularM";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::LpNumericalFailure: return "LpNumericalFailure";
    case ErrorCode::InvalidClass: return "InvalidClass";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionGuard: return "DimensionGuard";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Rate::Rate(double rho) : rho_(rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate must lie in (0, 1], got " + std::to_string(rho));
  }
}

namespace linalg {

namespace {

template <typename Mat>
std::optional<Mat> solve_impl(const Mat& A, const Mat& B, double rel_tol) {
  if (A.rows() != A.cols() || A.rows() != B.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve: incompatible shapes");
  }
  if (A.rows() == 0) return Mat(0, B.cols());
  const double scale = A.cwiseAbs().maxCoeff();
  if (scale == 0.0) return std::nullopt;
  Eigen::PartialPivLU<Mat> lu(A);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() < rel_tol * scale) return std::nullopt;
  return Mat(lu.solve(B));
}

}  // namespace

std::optional<CMatrix> solve_checked(const CMatrix& A, const CMatrix& B, double rel_tol) {
  return solve_impl(A, B, rel_tol);
}

std::optional<Matrix> solve_checked(const Matrix& A, const Matrix& B, double rel_tol) {
  return solve_impl(A, B, rel_tol);
}

SymmetricEigen jacobi_eigen(const Matrix& S, double tol, int max_sweeps) {
  if (S.rows() != S.cols()) throw Error(ErrorCode::DimensionMismatch, "jacobi: matrix not square");
  const Eigen::Index n = S.rows();
  Matrix a = 0.5 * (S + S.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double fro = std::max(a.norm(), 1e-300);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * fro) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

double lambda_max_symmetric(const Matrix& S) {
  if (S.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "lambda_max of empty matrix");
  if (S.rows() == 1) return S(0, 0);
  return jacobi_eigen(S).values.maxCoeff();
}

double lambda_max_hermitian(const CMatrix& H) {
  const Eigen::Index n = H.rows();
  if (n == 0 || H.cols() != n) throw Error(ErrorCode::DimensionMismatch, "lambda_max_hermitian: bad shape");
  if (n == 1) return H(0, 0).real();
  if (n == 2) {
    const double a = H(0, 0).real();
    const double d = H(1, 1).real();
    const Complex b = 0.5 * (H(0, 1) + std::conj(H(1, 0)));
    const double half = 0.5 * (a - d);
    return 0.5 * (a + d) + std::sqrt(half * half + std::norm(b));
  }
  Matrix embed(2 * n, 2 * n);
  embed.topLeftCorner(n, n) = H.real();
  embed.topRightCorner(n, n) = -H.imag();
  embed.bottomLeftCorner(n, n) = H.imag();
  embed.bottomRightCorner(n, n) = H.real();
  return lambda_max_symmetric(embed);
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  const Matrix gram = M.transpose() * M;
  return std::sqrt(std::max(0.0, lambda_max_symmetric(gram)));
}

CholeskyReport cholesky_check(const Matrix& P, double threshold) {
  CholeskyReport report;
  if (P.rows() == 0) {
    report.positive_definite = true;
    report.min_pivot_ratio = 1.0;
    return report;
  }
  const double trace = P.trace();
  if (!(trace > 0.0)) return report;
  Eigen::LLT<Matrix> llt(0.5 * (P + P.transpose()));
  if (llt.info() != Eigen::Success) return report;
  const Vector diag = Matrix(llt.matrixL()).diagonal();
  report.min_pivot_ratio = diag.cwiseAbs2().minCoeff() / trace;
  report.positive_definite = report.min_pivot_ratio > threshold;
  return report;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace linalg
}  // namespace iqcrate
