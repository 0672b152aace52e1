#include "generators.hpp"
#include "property.hpp"

#include "iqcrate/lurye.hpp"
#include "iqcrate/methods.hpp"
#include "iqcrate/weighting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace iqcrate;

namespace {

StateSpace first_order(double a, double b, double c) {
  return {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c), Matrix::Zero(1, 1)};
}

Signal impulse(Eigen::Index length) {
  std::vector<double> u(static_cast<std::size_t>(length), 0.0);
  u[0] = 1.0;
  return Signal::scalar(u);
}

TEST(SimulateLurye, ZeroNonlinearityIsOpenLoop) {
  gen::Rng rng(101);
  const StateSpace G = gen::stable_system(rng, 3, 1, 1, 0.9);
  const Signal d2 = impulse(40);
  const LuryeTrace t = simulate_lurye(G, NonlinearityDescriptor::linear_gain(0.0), Signal(), d2, Vector::Zero(3), 40);
  const Signal want = simulate(G, d2);
  EXPECT_LT((t.y.samples() - want.samples()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(t.w.norm(), 0.0);
  EXPECT_FALSE(t.overflow);
}

TEST(SimulateLurye, LinearGainClosesTheLoop) {
  // y_k = c (a + g b c)^k x0 with no disturbances.
  const double a = 0.6, b = 0.5, c = 2.0, g = -0.4;
  const LuryeTrace t = simulate_lurye(first_order(a, b, c), NonlinearityDescriptor::linear_gain(g), Signal(), Signal(),
                                      Vector::Ones(1), 50);
  const double pole = a + g * b * c;
  for (Eigen::Index k = 0; k < 50; ++k) EXPECT_NEAR(t.y(0, k), c * std::pow(pole, k), 1e-14);
  EXPECT_EQ(t.states.cols(), 51);
}

TEST(SimulateLurye, LoopResidualIsRoundoff) {
  const auto out = prop::for_all(100, 102, [](gen::Rng& rng, int) -> std::string {
    const StateSpace G = gen::stable_system(rng, gen::integer(rng, 1, 4), 1, 1, 0.95);
    const NonlinearityDescriptor delta = gen::integer(rng, 0, 1) == 0
                                             ? NonlinearityDescriptor::saturation(gen::uniform(rng, 0.2, 2.0))
                                             : NonlinearityDescriptor::example8_dynamic();
    const Signal d1 = gen::signal(rng, 1, 60);
    const Signal d2 = gen::signal(rng, 1, 60);
    const LuryeTrace t = simulate_lurye(G, delta, d1, d2, gen::matrix(rng, G.states(), 1), 60);
    if (t.overflow) return "unexpected overflow";
    const double r = t.loop_residual(G, delta, d1, d2);
    return r <= 1e-10 ? "" : "residual " + std::to_string(r);
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
}

TEST(SimulateLurye, OverflowStopsAndFlags) {
  const LuryeTrace t = simulate_lurye(first_order(0.0, 1.0, 1.0), NonlinearityDescriptor::linear_gain(10.0), Signal(),
                                      Signal(), Vector::Ones(1), 300);
  ASSERT_TRUE(t.overflow);
  ASSERT_TRUE(t.overflow_step.has_value());
  EXPECT_GE(*t.overflow_step, 145);
  EXPECT_LE(*t.overflow_step, 155);
}

TEST(SimulateLurye, RejectsDirectFeedthrough) {
  const StateSpace G(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_THROW((void)simulate_lurye(G, NonlinearityDescriptor::linear_gain(1.0), Signal(), Signal(), Vector::Zero(1), 5),
               Error);
}

TEST(DynamicNonlinearity, GainAtMostTwo) {
  // |x^3 / (2 (1 + x^2))| <= |x| / 2, so ||x|| <= ||v|| / (1 - 1/2).
  const auto out = prop::for_all(100, 103, [](gen::Rng& rng, int) -> std::string {
    const Signal v = gen::signal(rng, 1, 150, gen::uniform(rng, 0.1, 50.0));
    NonlinearOperator op(NonlinearityDescriptor::example8_dynamic());
    const Signal w = op.apply(v);
    return w.norm() <= 2.0 * v.norm() * (1.0 + 1e-12) ? "" : "gain above 2";
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
}

TEST(DecayRate, Geometric) {
  std::vector<double> y(100);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = 3.0 * std::pow(0.9, static_cast<double>(k));
  const DecayFit f = empirical_decay_rate(Signal::scalar(y));
  EXPECT_NEAR(f.rate, 0.9, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 100);
  EXPECT_NEAR(weighted_peak(Signal::scalar(y), 0.9), 3.0, 1e-12);
}

TEST(DecayRate, ModulatedStillRecoversRate) {
  std::vector<double> y(400);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double kk = static_cast<double>(k);
    y[k] = std::pow(0.95, kk) * (1.5 + std::sin(0.7 * kk));
  }
  const DecayFit f = empirical_decay_rate(Signal::scalar(y), 10);
  EXPECT_NEAR(f.rate, 0.95, 0.005);
  EXPECT_EQ(f.samples, 390);
}

TEST(DecayRate, ZeroSignal) {
  const DecayFit f = empirical_decay_rate(Signal::zeros(2, 30));
  EXPECT_TRUE(f.all_zero);
  EXPECT_EQ(f.rate, 0.0);
  EXPECT_EQ(f.samples, 0);
}

TEST(GainEstimate, StaticGain) {
  const SignalMap op = [](const Signal& u) { return 3.0 * u; };
  EXPECT_NEAR(estimate_l2_gain(op), 3.0, 1e-12);
  const SignalMap zero = [](const Signal& u) { return 0.0 * u; };
  EXPECT_EQ(estimate_l2_gain(zero), 0.0);
}

TEST(GainEstimate, PowerIterationApproachesHinf) {
  // 0.5 / (z - 0.5) peaks at 1 on the unit circle (w = 0).
  const StateSpace G = first_order(0.5, 1.0, 0.5);
  GainEstimateOptions opts;
  opts.power_iterations = 50;
  opts.adjoint = lti_adjoint(G);
  const double g = estimate_l2_gain(lti_operator(G), opts);
  EXPECT_LE(g, 1.0 + 1e-9);
  EXPECT_GT(g, 0.97);
  GainEstimateOptions plain;
  EXPECT_LE(estimate_l2_gain(lti_operator(G), plain), g + 1e-12);
}

TEST(GainEstimate, AdjointPairing) {
  gen::Rng rng(104);
  const StateSpace G = gen::stable_system(rng, 3, 2, 2, 0.9);
  const Signal u = gen::signal(rng, 2, 60);
  const Signal y = gen::signal(rng, 2, 60);
  const double lhs = (lti_operator(G)(u).samples().array() * y.samples().array()).sum();
  const double rhs = (u.samples().array() * lti_adjoint(G)(y).samples().array()).sum();
  EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::abs(lhs)));
}

TEST(GainEstimate, WeightedDynamicNonlinearity) {
  // The weighted state obeys |x_{k+1}| <= |x_k| / (2 rho) + |v_k| / rho, a
  // gain of at most 1 / (rho - 1/2).
  const double rho = 0.9;
  const SignalMap op = [rho](const Signal& v) {
    NonlinearOperator delta(NonlinearityDescriptor::example8_dynamic());
    return weight_signal(delta.apply(weight_signal(v, Rate(rho), WeightDirection::Plus)), Rate(rho),
                         WeightDirection::Minus);
  };
  GainEstimateOptions opts;
  opts.horizon = 120;
  const double g = estimate_l2_gain(op, opts);
  EXPECT_GT(g, 0.0);
  EXPECT_LE(g, 1.0 / (rho - 0.5));
}

TEST(TraceCsv, HeaderAndRowCount) {
  const LuryeTrace t = simulate_lurye(first_order(0.5, 1.0, 1.0), NonlinearityDescriptor::saturation(1.0), Signal(),
                                      impulse(12), Vector::Zero(1), 12);
  std::ostringstream os;
  write_trace_csv(t, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "k,u,y,v,w");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(TraceCsv, VectorChannelsExpand) {
  MethodSpec spec;
  spec.dimension = 2;
  const LuryeTrace t = simulate_lurye(method_to_lurye(spec).G, NonlinearityDescriptor::linear_gain(1.0), Signal(),
                                      Signal(), Vector::Ones(2), 3);
  std::ostringstream os;
  write_trace_csv(t, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "k,u_0,u_1,y_0,y_1,v_0,v_1,w_0,w_1");
}

TEST(Falsify, IndependentOfThreadCount) {
  MethodSpec spec;
  spec.alpha = 0.15;
  const StateSpace G = method_to_lurye(spec).G;
  FalsificationOptions opts;
  opts.trials = 30;
  opts.horizon = 150;
  const SectorBounds s(1.0, 10.0);
  const FalsificationReport one = falsify_rate(G, s, 0.86, opts);
  opts.threads = 3;
  const FalsificationReport three = falsify_rate(G, s, 0.86, opts);
  EXPECT_EQ(one.violations, three.violations);
  EXPECT_EQ(one.overflows, three.overflows);
  EXPECT_EQ(one.worst_growth, three.worst_growth);
  EXPECT_EQ(one.worst_empirical_rate, three.worst_empirical_rate);
}

TEST(Falsify, CatchesAnOptimisticRate) {
  // Slopes near 1 give the mode 1 - alpha = 0.8, far slower than 0.5.
  MethodSpec spec;
  spec.alpha = 0.2;
  FalsificationOptions opts;
  opts.trials = 20;
  opts.horizon = 200;
  const FalsificationReport r = falsify_rate(method_to_lurye(spec).G, SectorBounds(1.0, 1.5), 0.5, opts);
  EXPECT_GT(r.violations, 0);
}

}  // namespace
