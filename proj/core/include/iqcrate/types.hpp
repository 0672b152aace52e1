#pragma once

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iqcrate {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  DimensionMismatch,
  SingularResolvent,
  IllConditioned,
  SingularSylvester,
  Overflow,
  NotStabilizable,
  SingularM,
  Infeasible,
  LpNumericalFailure,
  InvalidClass,
  IoError,
  DimensionGuard,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Honest negatives (not Schur, infeasible LP,
/// not certified) are returned as values; this is reserved for misuse and
/// numerical breakdown.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Exponential weighting rate, 0 < rho <= 1.
class Rate {
 public:
  explicit Rate(double rho);

  [[nodiscard]] double value() const noexcept { return rho_; }
  explicit operator double() const noexcept { return rho_; }

 private:
  double rho_;
};

}  // namespace iqcrate
