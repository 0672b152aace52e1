#pragma once

#include "iqcrate/lti.hpp"

#include <functional>

namespace iqcrate {

enum class WeightDirection { Plus, Minus };

/// Largest admissible rho^{-k} before a weighting is rejected as overflow.
inline constexpr double kWeightCeiling = 1e300;

/// (rho_+ x)_k = rho^k x_k and (rho_- x)_k = rho^{-k} x_k.
Signal weight_signal(const Signal& x, Rate rho, WeightDirection direction);

/// (A/rho, B/rho, C, D), whose transfer function is G(rho z).
StateSpace scale_statespace(const StateSpace& ss, Rate rho);

using StaticMap = std::function<Vector(const Vector&)>;

/// Applies a scalar function to every component.
StaticMap elementwise(std::function<double(double)> phi);

/// w_k = rho^{-k} phi(rho^k v_k).
Signal weighted_static_apply(const StaticMap& phi, Rate rho, const Signal& v);

}  // namespace iqcrate
