#pragma once

#include "iqcrate/lurye.hpp"
#include "iqcrate/multipliers.hpp"

#include <functional>
#include <string>

namespace iqcrate {

enum class MethodKind { GradientDescent, HeavyBall, Nesterov };

std::string_view to_string(MethodKind kind);

struct MethodSpec {
  MethodKind kind = MethodKind::GradientDescent;
  double alpha = 0.1;
  double beta = 0.0;
  int dimension = 1;

  void validate() const;
};

/// Plant realization of a method in the positive-feedback loop u = grad f(y).
struct LuryeRealization {
  StateSpace G;
  std::string sign_convention;
};

/// Gradient descent: A = I, B = -alpha I, C = I.
/// Heavy ball: state (x_k, x_{k-1}), A = [(1+beta) I, -beta I; I, 0],
///   B = [-alpha I; 0], C = [I, 0].
/// Nesterov: same A and B, C = [(1+beta) I, -beta I] (gradient at the
///   extrapolated point).
LuryeRealization method_to_lurye(const MethodSpec& spec);

struct FunctionOracle {
  std::function<Vector(const Vector&)> gradient;
  SectorBounds sector;  // m = strong convexity, L = gradient Lipschitz constant
  Vector optimum;
  std::string name;
};

/// f(x) = 1/2 (x - x*)' diag(h) (x - x*), sector [min h, max h].
FunctionOracle quadratic_oracle(const Vector& curvatures, const Vector& optimum);

struct MethodRun {
  Matrix iterates;             // column k is x_k, k = 0..steps
  std::vector<double> errors;  // ||x_k - x*||
  DecayFit fit;
  bool overflow = false;
};

/// Runs the method through simulate_lurye with Delta = grad f and fits the
/// decay of the optimization error. x0 seeds every delayed copy of the state.
MethodRun run_method(const MethodSpec& spec, const FunctionOracle& f, const Vector& x0, Eigen::Index steps,
                     Eigen::Index burn_in = 0);

}  // namespace iqcrate
