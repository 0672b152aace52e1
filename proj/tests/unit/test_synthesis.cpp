#include "generators.hpp"
#include "oracles.hpp"
#include "property.hpp"

#include "iqcrate/methods.hpp"
#include "iqcrate/synthesis.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace iqcrate;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> data) {
  Matrix M(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : data) {
    Eigen::Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Lp, SingleBoundedVariable) {
  const LpResult r = lp_solve(rows({{1.0}, {-1.0}}), vec({1.0, 0.0}), vec({-1.0}));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
}

TEST(Lp, ContradictoryBoundsAreInfeasible) {
  const LpResult r = lp_solve(rows({{1.0}, {-1.0}}), vec({-1.0, -1.0}), vec({1.0}));
  EXPECT_EQ(r.status, LpStatus::Infeasible);
}

TEST(Lp, OpenDirectionIsUnbounded) {
  const LpResult r = lp_solve(rows({{-1.0}}), vec({0.0}), vec({-1.0}));
  EXPECT_EQ(r.status, LpStatus::Unbounded);
}

TEST(Lp, DegenerateVertex) {
  // Three constraints meet at the optimum (1, 1).
  const LpResult r = lp_solve(rows({{1, 0}, {0, 1}, {1, 1}, {-1, 0}, {0, -1}}), vec({1, 1, 2, 0, 0}), vec({-1, -1}));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -2.0, 1e-12);
}

TEST(Lp, MatchesVertexEnumeration) {
  gen::Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 8, m = 20;
    Matrix A(m, n);
    Vector b(m);
    // A box keeps the problem bounded; the remaining rows are random cuts
    // through a neighborhood of the origin, which stays feasible.
    A.topRows(2 * n) << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    b.head(2 * n).setConstant(gen::uniform(rng, 1.0, 5.0));
    A.bottomRows(m - 2 * n) = gen::matrix(rng, m - 2 * n, n);
    for (int i = 2 * n; i < m; ++i) b(i) = gen::uniform(rng, 0.1, 2.0);
    const Vector c = gen::matrix(rng, n, 1);
    const LpResult r = lp_solve(A, b, c);
    const auto want = oracle::lp_by_vertices(A, b, c);
    ASSERT_TRUE(want.has_value());
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, *want, 1e-8 * std::max(1.0, std::abs(*want)));
    EXPECT_LE(r.residual, 1e-9);
    EXPECT_LE(((A * r.x - b).array()).maxCoeff(), 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST(Lp, RandomSmallProblemsAgreeWithOracle) {
  const auto out = prop::for_all(100, 72, [](gen::Rng& rng, int) -> std::string {
    const int n = gen::integer(rng, 1, 4);
    const int extra = gen::integer(rng, 0, 6);
    Matrix A(2 * n + extra, n);
    Vector b(2 * n + extra);
    A.topRows(2 * n) << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    b.head(2 * n) = gen::matrix(rng, 2 * n, 1).cwiseAbs().array() + 0.5;
    A.bottomRows(extra) = gen::matrix(rng, extra, n);
    b.tail(extra) = gen::matrix(rng, extra, 1);  // may be infeasible
    const Vector c = gen::matrix(rng, n, 1);
    const LpResult r = lp_solve(A, b, c);
    const auto want = oracle::lp_by_vertices(A, b, c, 1e-9);
    if (!want) return r.status == LpStatus::Infeasible ? "" : "oracle infeasible, solver says otherwise";
    if (r.status != LpStatus::Optimal) return "solver status " + std::string(to_string(r.status));
    return std::abs(r.objective - *want) <= 1e-8 * std::max(1.0, std::abs(*want)) ? "" : "objective mismatch";
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
}

CoprimePair gd_pair(double alpha, double rho) {
  MethodSpec spec;
  spec.alpha = alpha;
  return rcf(method_to_lurye(spec).G, Rate(rho));
}

TEST(Synthesis, StaticMultiplierReachesQuadraticFloor) {
  const SectorBounds s(1.0, 10.0);
  SynthesisConfig cfg;
  cfg.half_order = 0;
  for (double alpha : {0.05, 0.1, 2.0 / 11.0}) {
    const double floor = std::max(std::abs(1.0 - alpha * s.m), std::abs(1.0 - alpha * s.L));
    const SynthesisResult above = synthesize_multiplier(gd_pair(alpha, floor + 5e-3), s, Rate(floor + 5e-3), cfg);
    EXPECT_TRUE(above.feasible) << "alpha=" << alpha << ": " << above.diagnosis;
    const SynthesisResult below = synthesize_multiplier(gd_pair(alpha, floor - 5e-3), s, Rate(floor - 5e-3), cfg);
    EXPECT_FALSE(below.feasible) << "alpha=" << alpha;
    EXPECT_FALSE(below.diagnosis.empty());
  }
}

TEST(Synthesis, NoRateBelowFloorAtAnyOrder) {
  const SectorBounds s(1.0, 10.0);
  SynthesisConfig cfg;
  cfg.half_order = 5;
  const double alpha = 2.0 / 11.0, rho = 9.0 / 11.0 - 5e-3;
  EXPECT_FALSE(synthesize_multiplier(gd_pair(alpha, rho), s, Rate(rho), cfg).feasible);
}

TEST(Synthesis, ReturnedMultiplierIsIndependentlyValid) {
  // Heavy-ball plants near their certified rates exercise nontrivial taps.
  int feasible = 0;
  const auto out = prop::for_all(100, 73, [&](gen::Rng& rng, int) -> std::string {
    MethodSpec spec;
    spec.kind = MethodKind::HeavyBall;
    spec.alpha = gen::uniform(rng, 0.03, 0.15);
    spec.beta = gen::uniform(rng, 0.0, 0.5);
    const double rho = gen::uniform(rng, 0.8, 0.99);
    const SectorBounds s(1.0, 10.0);
    SynthesisConfig cfg;
    cfg.half_order = gen::integer(rng, 0, 5);
    cfg.grid_points = 256;
    const CoprimePair pair = rcf(method_to_lurye(spec).G, Rate(rho));
    const SynthesisResult r = synthesize_multiplier(pair, s, Rate(rho), cfg);
    if (!r.feasible) return r.multiplier ? "infeasible result carries a multiplier" : "";
    ++feasible;
    if (!check_rho_validity(*r.multiplier, rho).valid) return "returned taps are not rho-valid";
    if (r.multiplier->tap(0) != 1.0) return "center tap not normalized";
    const FdiReport again = fdi_margin(pair, zames_falb_provider(*r.multiplier, s), FrequencyGrid::uniform(4096));
    if (!again.certified(cfg.epsilon * 0.5)) return "dense re-check margin " + std::to_string(again.margin);
    return "";
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
  EXPECT_GT(feasible, 20);
}

TEST(Synthesis, FeasibilityIsMonotoneInOrder) {
  int checked = 0;
  const auto out = prop::for_all(100, 74, [&](gen::Rng& rng, int) -> std::string {
    MethodSpec spec;
    spec.kind = MethodKind::HeavyBall;
    spec.alpha = gen::uniform(rng, 0.03, 0.15);
    spec.beta = gen::uniform(rng, 0.0, 0.5);
    const double rho = gen::uniform(rng, 0.8, 0.99);
    const SectorBounds s(1.0, 10.0);
    SynthesisConfig cfg;
    cfg.grid_points = 256;
    cfg.half_order = gen::integer(rng, 0, 4);
    const CoprimePair pair = rcf(method_to_lurye(spec).G, Rate(rho));
    if (!synthesize_multiplier(pair, s, Rate(rho), cfg).feasible) return "";
    ++checked;
    cfg.half_order += 1;
    const SynthesisResult next = synthesize_multiplier(pair, s, Rate(rho), cfg);
    return next.feasible ? "" : "order " + std::to_string(cfg.half_order) + " lost feasibility: " + next.diagnosis;
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
  EXPECT_GT(checked, 20);
}

TEST(Synthesis, TapCoefficientsReproduceForm) {
  gen::Rng rng(75);
  const StateSpace G = gen::any_system(rng, 3, 1, 1);
  const double rho = 0.9;
  const CoprimePair pair = rcf(G, Rate(rho));
  const SectorBounds s(0.5, 6.0);
  const ZamesFalbFir zf = gen::valid_multiplier(rng, 4, rho);
  Vector taps(9);
  for (int i = -4; i <= 4; ++i) taps(i + 4) = zf.tap(i);
  for (double w : {0.0, 0.4, 1.9, kPi}) {
    const Vector c = fdi_tap_coefficients(pair.stacked(), s, 4, w);
    const double direct = fdi_matrix(pair.stacked(), zames_falb_provider(zf, s), w)(0, 0).real();
    EXPECT_NEAR(c.dot(taps), direct, 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Synthesis, ConfigValidation) {
  SynthesisConfig cfg;
  cfg.half_order = -1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.half_order = 2;
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Synthesis, RejectsMultiInputPairs) {
  gen::Rng rng(76);
  const CoprimePair pair = rcf(gen::stable_system(rng, 2, 2, 2, 0.5), Rate(1.0));
  EXPECT_THROW((void)synthesize_multiplier(pair, SectorBounds(0.0, 1.0), Rate(1.0)), Error);
}

}  // namespace
