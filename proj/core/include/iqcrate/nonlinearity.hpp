#pragma once

#include "iqcrate/lti.hpp"
#include "iqcrate/multipliers.hpp"
#include "iqcrate/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace iqcrate {

enum class NonlinearityKind { Saturation, Deadzone, PiecewiseLinear, Gain, Example8Dynamic, Callable };

std::string_view to_string(NonlinearityKind kind);

/// Scalar piecewise-linear map through the origin. slopes has one more entry
/// than breakpoints; slopes[i] applies left of breakpoints[i], the last slope
/// right of the final breakpoint.
struct PiecewiseLinear {
  std::vector<double> breakpoints;  // strictly increasing
  std::vector<double> slopes;

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double min_slope() const;
  [[nodiscard]] double max_slope() const;
};

/// 16 breakpoints uniform on [-10, 10], slopes i.i.d. uniform in [m, L].
PiecewiseLinear random_piecewise_linear(const SectorBounds& sector, std::mt19937_64& rng, int breakpoints = 16);

struct NonlinearityDescriptor {
  NonlinearityKind kind = NonlinearityKind::Gain;
  SectorBounds sector;  // declared slope bounds for the static kinds
  double level = 1.0;   // saturation level or deadzone half-width
  double gain = 0.0;
  PiecewiseLinear pwl;
  std::function<Vector(const Vector&)> callable;  // vector map, e.g. a gradient
  std::string label;

  static NonlinearityDescriptor saturation(double level);    // slopes in [0, 1]
  static NonlinearityDescriptor deadzone(double half_width); // slopes in [0, 1]
  static NonlinearityDescriptor piecewise_linear(PiecewiseLinear pwl);
  static NonlinearityDescriptor linear_gain(double c);
  /// x_{k+1} = x_k^3 / (2 (1 + x_k^2)) + v_k, w_k = x_k, x_0 = 0.
  static NonlinearityDescriptor example8_dynamic();
  static NonlinearityDescriptor from_callable(std::function<Vector(const Vector&)> fn, SectorBounds sector,
                                              std::string label = "callable");

  [[nodiscard]] bool is_static() const { return kind != NonlinearityKind::Example8Dynamic; }
};

/// Causal operator instance with its own state; static kinds act componentwise.
class NonlinearOperator {
 public:
  explicit NonlinearOperator(NonlinearityDescriptor desc);

  void reset();
  /// Output at the current step for input v, then advances the internal state.
  Vector step(const Vector& v);
  /// The whole response to v from a reset state.
  Signal apply(const Signal& v);

  [[nodiscard]] const NonlinearityDescriptor& descriptor() const { return desc_; }

 private:
  double scalar(double x) const;

  NonlinearityDescriptor desc_;
  Vector state_;
};

struct SlopeSampleReport {
  bool ok = true;
  double min_slope = 0.0;
  double max_slope = 0.0;
};

/// Secant slopes of a scalar map over `samples` random pairs in [-range, range].
SlopeSampleReport sample_slopes(const std::function<double(double)>& phi, const SectorBounds& sector,
                                std::uint64_t seed, int samples = 2000, double range = 20.0, double tol = 1e-9);

}  // namespace iqcrate
