#pragma once

#include "iqcrate/lti.hpp"
#include "iqcrate/nonlinearity.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

namespace iqcrate {

inline constexpr double kOverflowThreshold = 1e150;

struct LuryeTrace {
  Signal u, y, v, w;
  Matrix states;  // column k is the plant state at time k (horizon + 1 columns)
  Vector x0;
  Eigen::Index horizon = 0;
  bool overflow = false;
  std::optional<Eigen::Index> overflow_step;  // samples from here on are not computed

  /// Largest violation of y = G u, v = y + d1, w = Delta v, u = w + d2 when the
  /// recorded signals are substituted back (the Delta part uses a fresh operator).
  [[nodiscard]] double loop_residual(const StateSpace& G, const NonlinearityDescriptor& delta, const Signal& d1,
                                     const Signal& d2) const;
};

/// y = G u, w = Delta v, v = y + d1, u = w + d2 for a strictly proper G.
/// Per step: y from the state, then v, w, u, then the state update. An
/// empty disturbance signal means zero. Overflow past 1e150 stops the run
/// and is flagged, not thrown.
LuryeTrace simulate_lurye(const StateSpace& G, const NonlinearityDescriptor& delta, const Signal& d1, const Signal& d2,
                          const Vector& x0, Eigen::Index horizon);

struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
  bool all_zero = false;
  int samples = 0;
};

/// Least-squares slope of log ||y_k|| against k over k >= burn_in where
/// ||y_k|| > 1e-140; rate = exp(slope). Returns all_zero with rate 0 when no
/// sample qualifies.
DecayFit empirical_decay_rate(const Signal& y, Eigen::Index burn_in = 0);

/// sup_k rho^{-k} ||y_k|| over the trace, an estimate of the transient constant.
double weighted_peak(const Signal& y, double rho, Eigen::Index upto = -1);

using SignalMap = std::function<Signal(const Signal&)>;

struct GainEstimateOptions {
  int trials = 20;
  Eigen::Index horizon = 200;
  Eigen::Index dim = 1;
  std::uint64_t seed = 1;
  int power_iterations = 0;  // > 0 requires `adjoint`
  SignalMap adjoint;         // finite-horizon adjoint of a linear operator
};

/// max ||op(u)|| / ||u|| over random inputs, refined by power iteration when
/// an adjoint is supplied; always a lower bound on the l2 gain.
double estimate_l2_gain(const SignalMap& op, const GainEstimateOptions& opts = {});

/// Zero-state response of G and its finite-horizon adjoint (time reversal
/// through the transposed realization).
SignalMap lti_operator(const StateSpace& G);
SignalMap lti_adjoint(const StateSpace& G);

/// CSV with columns k, u, y, v, w (vector signals expand to u_0, u_1, ...).
void write_trace_csv(const LuryeTrace& trace, std::ostream& os);

struct FalsificationOptions {
  int trials = 500;
  Eigen::Index horizon = 300;
  Eigen::Index early_window = 20;
  double rate_slack = 0.01;
  double growth_limit = 1e6;
  std::uint64_t seed = 7;
  unsigned threads = 1;
};

struct FalsificationReport {
  int trials = 0;
  int violations = 0;
  int overflows = 0;
  double worst_growth = 0.0;  // max over trials of late/early weighted peak ratio
  double worst_empirical_rate = 0.0;
};

/// Random slope-restricted piecewise-linear loops (repeated scalar across
/// channels) with random x0 and disturbances decaying at rate rho. A trial
/// violates when sup_k (rho + slack)^{-k} ||y_k|| exceeds growth_limit times
/// its value over the early window. Seeds derive from (seed, trial index) so
/// results do not depend on the thread count.
FalsificationReport falsify_rate(const StateSpace& G, const SectorBounds& sector, double rho,
                                 const FalsificationOptions& opts = {});

}  // namespace iqcrate
