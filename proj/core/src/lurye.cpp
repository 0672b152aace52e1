#include "iqcrate/lurye.hpp"

#include "iqcrate/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace iqcrate {

namespace {

Vector sample_or_zero(const Signal& s, Eigen::Index k, Eigen::Index dim) {
  if (s.length() == 0) return Vector::Zero(dim);
  if (s.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "disturbance dimension does not match the loop");
  if (k >= s.length()) return Vector::Zero(dim);
  return s.at(k);
}

bool exceeds(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(std::abs(x(i)) <= kOverflowThreshold)) return true;
  return false;
}

}  // namespace

LuryeTrace simulate_lurye(const StateSpace& G, const NonlinearityDescriptor& delta, const Signal& d1, const Signal& d2,
                          const Vector& x0, Eigen::Index horizon) {
  if (G.D().size() > 0 && G.D().cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "simulate_lurye requires D = 0 for an explicit loop");
  if (G.inputs() != G.outputs())
    throw Error(ErrorCode::DimensionMismatch, "loop needs as many plant inputs as outputs");
  if (x0.size() != G.states()) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong length");
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be nonnegative");
  const Eigen::Index p = G.outputs();

  LuryeTrace tr;
  tr.x0 = x0;
  tr.horizon = horizon;
  Matrix U = Matrix::Zero(p, horizon), Y = Matrix::Zero(p, horizon), V = Matrix::Zero(p, horizon),
         W = Matrix::Zero(p, horizon);
  tr.states = Matrix::Zero(G.states(), horizon + 1);
  tr.states.col(0) = x0;
  NonlinearOperator op(delta);
  Vector x = x0;
  for (Eigen::Index k = 0; k < horizon; ++k) {
    const Vector y = G.C() * x;
    const Vector v = y + sample_or_zero(d1, k, p);
    const Vector w = op.step(v);
    if (w.size() != p) throw Error(ErrorCode::DimensionMismatch, "nonlinearity output has the wrong dimension");
    const Vector u = w + sample_or_zero(d2, k, p);
    Y.col(k) = y;
    V.col(k) = v;
    W.col(k) = w;
    U.col(k) = u;
    if (exceeds(y) || exceeds(w) || exceeds(u)) {
      tr.overflow = true;
      tr.overflow_step = k;
      break;
    }
    x = G.A() * x + G.B() * u;
    tr.states.col(k + 1) = x;
    if (exceeds(x)) {
      tr.overflow = true;
      tr.overflow_step = k + 1;
      break;
    }
  }
  tr.u = Signal(std::move(U));
  tr.y = Signal(std::move(Y));
  tr.v = Signal(std::move(V));
  tr.w = Signal(std::move(W));
  return tr;
}

double LuryeTrace::loop_residual(const StateSpace& G, const NonlinearityDescriptor& delta, const Signal& d1,
                                 const Signal& d2) const {
  const Eigen::Index T = overflow_step ? *overflow_step : horizon;
  if (T == 0) return 0.0;
  const Eigen::Index p = y.dim();
  const Signal u_head(u.samples().leftCols(T));
  const Signal y_sim = simulate(G, u_head, x0);
  NonlinearOperator op(delta);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < T; ++k) {
    const double scale = std::max(1.0, y.sample_norm(k) + u.sample_norm(k));
    worst = std::max(worst, (y_sim.at(k) - y.at(k)).norm() / scale);
    worst = std::max(worst, (v.at(k) - y.at(k) - sample_or_zero(d1, k, p)).norm() / scale);
    worst = std::max(worst, (op.step(v.at(k)) - w.at(k)).norm() / scale);
    worst = std::max(worst, (u.at(k) - w.at(k) - sample_or_zero(d2, k, p)).norm() / scale);
  }
  return worst;
}

DecayFit empirical_decay_rate(const Signal& y, Eigen::Index burn_in) {
  DecayFit fit;
  double sk = 0, sl = 0, skk = 0, skl = 0, sll = 0;
  int n = 0;
  for (Eigen::Index k = std::max<Eigen::Index>(0, burn_in); k < y.length(); ++k) {
    const double norm = y.sample_norm(k);
    if (!(norm > 1e-140) || !std::isfinite(norm)) continue;
    const double l = std::log(norm);
    const double kk = static_cast<double>(k);
    sk += kk;
    sl += l;
    skk += kk * kk;
    skl += kk * l;
    sll += l * l;
    ++n;
  }
  fit.samples = n;
  if (n == 0) {
    fit.all_zero = true;
    return fit;
  }
  if (n == 1) {
    fit.rate = 0.0;
    fit.r_squared = 0.0;
    return fit;
  }
  const double vk = skk - sk * sk / n;
  const double vl = sll - sl * sl / n;
  const double ckl = skl - sk * sl / n;
  const double slope = vk > 0.0 ? ckl / vk : 0.0;
  fit.rate = std::exp(slope);
  fit.r_squared = (vk > 0.0 && vl > 0.0) ? (ckl * ckl) / (vk * vl) : 1.0;
  return fit;
}

double weighted_peak(const Signal& y, double rho, Eigen::Index upto) {
  const Eigen::Index T = upto < 0 ? y.length() : std::min(upto, y.length());
  double peak = 0.0;
  // Logs keep rho^{-k} from overflowing on long horizons.
  for (Eigen::Index k = 0; k < T; ++k) {
    const double n = y.sample_norm(k);
    if (n == 0.0) continue;
    peak = std::max(peak, std::exp(std::log(n) - static_cast<double>(k) * std::log(rho)));
  }
  return peak;
}

double estimate_l2_gain(const SignalMap& op, const GainEstimateOptions& opts) {
  if (opts.power_iterations > 0 && !opts.adjoint)
    throw Error(ErrorCode::InvalidArgument, "power iteration needs the adjoint operator");
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = 0.0;
  Signal best_input;
  for (int t = 0; t < opts.trials; ++t) {
    Matrix u(opts.dim, opts.horizon);
    // Mix white inputs with slowly varying ones to excite low frequencies.
    const bool smooth = t % 2 == 1;
    for (Eigen::Index i = 0; i < opts.dim; ++i) {
      double prev = 0.0;
      for (Eigen::Index k = 0; k < opts.horizon; ++k) {
        prev = smooth ? 0.95 * prev + normal(rng) : normal(rng);
        u(i, k) = prev;
      }
    }
    const Signal in(u);
    if (in.norm() == 0.0) continue;
    const double ratio = op(in).norm() / in.norm();
    if (ratio > best) {
      best = ratio;
      best_input = in;
    }
  }
  if (opts.power_iterations > 0 && best_input.length() > 0) {
    Signal x = (1.0 / best_input.norm()) * best_input;
    for (int it = 0; it < opts.power_iterations; ++it) {
      const Signal y = op(x);
      best = std::max(best, y.norm() / x.norm());
      const Signal z = opts.adjoint(y);
      const double zn = z.norm();
      if (zn == 0.0) break;
      x = (1.0 / zn) * z;
    }
  }
  return best;
}

SignalMap lti_operator(const StateSpace& G) {
  return [G](const Signal& u) { return simulate(G, u); };
}

SignalMap lti_adjoint(const StateSpace& G) {
  const StateSpace Gt(G.A().transpose(), G.C().transpose(), G.B().transpose(), G.D().transpose());
  return [Gt](const Signal& y) {
    const Matrix rev = y.samples().rowwise().reverse();
    const Signal out = simulate(Gt, Signal(rev));
    return Signal(Matrix(out.samples().rowwise().reverse()));
  };
}

void write_trace_csv(const LuryeTrace& trace, std::ostream& os) {
  const Eigen::Index p = trace.y.dim();
  const Eigen::Index T = trace.overflow_step ? *trace.overflow_step + 1 : trace.horizon;
  auto header = [&](const char* name) {
    if (p == 1) {
      os << ',' << name;
      return;
    }
    for (Eigen::Index i = 0; i < p; ++i) os << ',' << name << '_' << i;
  };
  os << 'k';
  header("u");
  header("y");
  header("v");
  header("w");
  os << '\n' << std::setprecision(17);
  for (Eigen::Index k = 0; k < std::min(T, trace.horizon); ++k) {
    os << k;
    for (const Signal* s : {&trace.u, &trace.y, &trace.v, &trace.w})
      for (Eigen::Index i = 0; i < p; ++i) os << ',' << (*s)(i, k);
    os << '\n';
  }
}

FalsificationReport falsify_rate(const StateSpace& G, const SectorBounds& sector, double rho,
                                 const FalsificationOptions& opts) {
  struct Trial {
    bool violation = false;
    bool overflow = false;
    double growth = 0.0;
    double rate = 0.0;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(std::max(0, opts.trials)));
  const Eigen::Index p = G.outputs();
  const double weight = rho + opts.rate_slack;
  parallel_for(trials.size(), opts.threads, [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const NonlinearityDescriptor phi = NonlinearityDescriptor::piecewise_linear(random_piecewise_linear(sector, rng));
    Vector x0(G.states());
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = 5.0 * normal(rng);
    Matrix d1(p, opts.horizon), d2(p, opts.horizon);
    double decay = 1.0;
    for (Eigen::Index k = 0; k < opts.horizon; ++k) {
      for (Eigen::Index i = 0; i < p; ++i) {
        d1(i, k) = decay * normal(rng);
        d2(i, k) = decay * normal(rng);
      }
      decay *= rho;
    }
    const LuryeTrace tr = simulate_lurye(G, phi, Signal(d1), Signal(d2), x0, opts.horizon);
    Trial& out = trials[t];
    out.overflow = tr.overflow;
    const double early = weighted_peak(tr.y, weight, opts.early_window);
    const double late = weighted_peak(tr.y, weight);
    out.growth = early > 0.0 ? late / early : (late > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.violation = tr.overflow || out.growth > opts.growth_limit;
    out.rate = empirical_decay_rate(tr.y, opts.horizon / 2).rate;
  });
  FalsificationReport rep;
  rep.trials = static_cast<int>(trials.size());
  for (const Trial& t : trials) {
    rep.violations += t.violation ? 1 : 0;
    rep.overflows += t.overflow ? 1 : 0;
    rep.worst_growth = std::max(rep.worst_growth, t.growth);
    rep.worst_empirical_rate = std::max(rep.worst_empirical_rate, t.rate);
  }
  return rep;
}

}  // namespace iqcrate
