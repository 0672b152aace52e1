#include "iqcrate/nonlinearity.hpp"

#include "iqcrate/lti.hpp"

#include <algorithm>
#include <cmath>

namespace iqcrate {

std::string_view to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Saturation: return "saturation";
    case NonlinearityKind::Deadzone: return "deadzone";
    case NonlinearityKind::PiecewiseLinear: return "piecewise_linear";
    case NonlinearityKind::Gain: return "gain";
    case NonlinearityKind::Example8Dynamic: return "example8";
    case NonlinearityKind::Callable: return "callable";
  }
  return "unknown";
}

double PiecewiseLinear::operator()(double x) const {
  // Integrate the slope profile from 0 to x.
  const auto& b = breakpoints;
  auto slope_at = [&](std::size_t seg) { return slopes[seg]; };
  const std::size_t zero_seg = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), 0.0) - b.begin());
  const std::size_t x_seg = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
  if (x_seg == zero_seg) return slope_at(zero_seg) * x;
  double acc = 0.0;
  if (x > 0.0) {
    double pos = 0.0;
    for (std::size_t s = zero_seg; s < x_seg; ++s) {
      acc += slope_at(s) * (b[s] - pos);
      pos = b[s];
    }
    return acc + slope_at(x_seg) * (x - pos);
  }
  double pos = 0.0;
  for (std::size_t s = zero_seg; s > x_seg; --s) {
    acc -= slope_at(s) * (pos - b[s - 1]);
    pos = b[s - 1];
  }
  return acc - slope_at(x_seg) * (pos - x);
}

double PiecewiseLinear::min_slope() const { return *std::min_element(slopes.begin(), slopes.end()); }
double PiecewiseLinear::max_slope() const { return *std::max_element(slopes.begin(), slopes.end()); }

PiecewiseLinear random_piecewise_linear(const SectorBounds& sector, std::mt19937_64& rng, int breakpoints) {
  std::uniform_real_distribution<double> where(-10.0, 10.0);
  std::uniform_real_distribution<double> slope(sector.m, sector.L);
  PiecewiseLinear out;
  for (int i = 0; i < breakpoints; ++i) out.breakpoints.push_back(where(rng));
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end()), out.breakpoints.end());
  for (std::size_t i = 0; i <= out.breakpoints.size(); ++i) out.slopes.push_back(slope(rng));
  return out;
}

NonlinearityDescriptor NonlinearityDescriptor::saturation(double level) {
  if (!(level > 0.0)) throw Error(ErrorCode::InvalidArgument, "saturation level must be positive");
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::Saturation;
  d.sector = SectorBounds(0.0, 1.0);
  d.level = level;
  d.label = "saturation";
  return d;
}

NonlinearityDescriptor NonlinearityDescriptor::deadzone(double half_width) {
  if (!(half_width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "deadzone width must be nonnegative");
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::Deadzone;
  d.sector = SectorBounds(0.0, 1.0);
  d.level = half_width;
  d.label = "deadzone";
  return d;
}

NonlinearityDescriptor NonlinearityDescriptor::piecewise_linear(PiecewiseLinear pwl) {
  if (pwl.slopes.size() != pwl.breakpoints.size() + 1)
    throw Error(ErrorCode::InvalidArgument, "piecewise-linear map needs one more slope than breakpoints");
  if (!std::is_sorted(pwl.breakpoints.begin(), pwl.breakpoints.end()))
    throw Error(ErrorCode::InvalidArgument, "breakpoints must be increasing");
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::PiecewiseLinear;
  d.sector = SectorBounds(std::max(0.0, pwl.min_slope()), pwl.max_slope());
  d.pwl = std::move(pwl);
  d.label = "piecewise_linear";
  return d;
}

NonlinearityDescriptor NonlinearityDescriptor::linear_gain(double c) {
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::Gain;
  if (c >= 0.0) d.sector = SectorBounds(c, c);
  d.gain = c;
  d.label = "gain";
  return d;
}

NonlinearityDescriptor NonlinearityDescriptor::example8_dynamic() {
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::Example8Dynamic;
  d.label = "example8";
  return d;
}

NonlinearityDescriptor NonlinearityDescriptor::from_callable(std::function<Vector(const Vector&)> fn,
                                                             SectorBounds sector, std::string label) {
  NonlinearityDescriptor d;
  d.kind = NonlinearityKind::Callable;
  d.callable = std::move(fn);
  d.sector = sector;
  d.label = std::move(label);
  return d;
}

NonlinearOperator::NonlinearOperator(NonlinearityDescriptor desc) : desc_(std::move(desc)) {
  if (desc_.kind == NonlinearityKind::Callable && !desc_.callable)
    throw Error(ErrorCode::InvalidArgument, "callable nonlinearity without a function");
}

void NonlinearOperator::reset() { state_.resize(0); }

double NonlinearOperator::scalar(double x) const {
  switch (desc_.kind) {
    case NonlinearityKind::Saturation: return std::clamp(x, -desc_.level, desc_.level);
    case NonlinearityKind::Deadzone:
      if (x > desc_.level) return x - desc_.level;
      if (x < -desc_.level) return x + desc_.level;
      return 0.0;
    case NonlinearityKind::PiecewiseLinear: return desc_.pwl(x);
    case NonlinearityKind::Gain: return desc_.gain * x;
    default: break;
  }
  return 0.0;
}

Vector NonlinearOperator::step(const Vector& v) {
  switch (desc_.kind) {
    case NonlinearityKind::Callable: return desc_.callable(v);
    case NonlinearityKind::Example8Dynamic: {
      if (state_.size() != v.size()) state_ = Vector::Zero(v.size());
      const Vector w = state_;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = state_(i);
        state_(i) = 0.5 * x * x * x / (1.0 + x * x) + v(i);
      }
      return w;
    }
    default: {
      Vector w(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) w(i) = scalar(v(i));
      return w;
    }
  }
}

Signal NonlinearOperator::apply(const Signal& v) {
  reset();
  Matrix out(v.dim(), v.length());
  for (Eigen::Index k = 0; k < v.length(); ++k) {
    const Vector w = step(v.at(k));
    if (w.size() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "nonlinearity changed the signal dimension");
    out.col(k) = w;
  }
  return Signal(std::move(out));
}

SlopeSampleReport sample_slopes(const std::function<double(double)>& phi, const SectorBounds& sector,
                                std::uint64_t seed, int samples, double range, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(-range, range);
  SlopeSampleReport out;
  out.min_slope = std::numeric_limits<double>::infinity();
  out.max_slope = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double a = pick(rng);
    const double b = pick(rng);
    if (std::abs(a - b) < 1e-9) continue;
    const double slope = (phi(a) - phi(b)) / (a - b);
    out.min_slope = std::min(out.min_slope, slope);
    out.max_slope = std::max(out.max_slope, slope);
  }
  const double scale = std::max(1.0, std::abs(sector.L));
  out.ok = out.min_slope >= sector.m - tol * scale && out.max_slope <= sector.L + tol * scale;
  return out;
}

}  // namespace iqcrate
