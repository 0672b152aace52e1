#include "iqcrate/weighting.hpp"

#include <cmath>

namespace iqcrate {

namespace {

void guard_horizon(Rate rho, Eigen::Index length) {
  if (length <= 1 || rho.value() == 1.0) return;
  const double log_peak = -static_cast<double>(length - 1) * std::log(rho.value());
  if (log_peak > std::log(kWeightCeiling)) {
    throw Error(ErrorCode::Overflow, "rho^-k exceeds 1e300 within a horizon of " + std::to_string(length));
  }
}

}  // namespace

Signal weight_signal(const Signal& x, Rate rho, WeightDirection direction) {
  if (direction == WeightDirection::Minus) guard_horizon(rho, x.length());
  // Both directions use the same rounded rho^k so that they invert each other
  // to within one rounding per sample.
  Matrix out = x.samples();
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    const double w = std::pow(rho.value(), static_cast<double>(k));
    if (direction == WeightDirection::Plus)
      out.col(k) *= w;
    else
      out.col(k) /= w;
  }
  return Signal(std::move(out));
}

StateSpace scale_statespace(const StateSpace& ss, Rate rho) {
  const double inv = 1.0 / rho.value();
  return StateSpace(ss.A() * inv, ss.B() * inv, ss.C(), ss.D());
}

StaticMap elementwise(std::function<double(double)> phi) {
  return [phi = std::move(phi)](const Vector& v) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = phi(v(i));
    return out;
  };
}

Signal weighted_static_apply(const StaticMap& phi, Rate rho, const Signal& v) {
  guard_horizon(rho, v.length());
  const double r = rho.value();
  Matrix out(v.dim(), v.length());
  for (Eigen::Index k = 0; k < v.length(); ++k) {
    const double up = std::pow(r, static_cast<double>(k));
    const Vector image = phi(up * v.samples().col(k));
    if (image.size() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "static map changed dimension");
    out.col(k) = image / up;
  }
  return Signal(std::move(out));
}

}  // namespace iqcrate
