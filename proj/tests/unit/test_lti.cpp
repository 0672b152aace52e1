#include "generators.hpp"
#include "oracles.hpp"
#include "property.hpp"

#include "iqcrate/lti.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

using namespace iqcrate;

namespace {

StateSpace siso(std::initializer_list<double> den_tail, double gain = 1.0) {
  // Controllable canonical form of gain / (z^n + a1 z^{n-1} + ... + an).
  const auto n = static_cast<Eigen::Index>(den_tail.size());
  Matrix A = Matrix::Zero(n, n);
  Eigen::Index j = 0;
  for (double a : den_tail) A(0, j++) = -a;
  for (Eigen::Index i = 1; i < n; ++i) A(i, i - 1) = 1.0;
  Matrix B = Matrix::Zero(n, 1);
  B(0, 0) = 1.0;
  Matrix C = Matrix::Zero(1, n);
  C(0, n - 1) = gain;
  return {A, B, C, Matrix::Zero(1, 1)};
}

TEST(StateSpace, RejectsInconsistentDimensions) {
  EXPECT_THROW(StateSpace(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)), Error);
  EXPECT_THROW(StateSpace(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(2, 1)), Error);
}

TEST(FrequencyGrid, UniformHasEndpointsAndIncreases) {
  const FrequencyGrid g = FrequencyGrid::uniform(17);
  ASSERT_EQ(g.size(), 17u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_DOUBLE_EQ(g[16], kPi);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_THROW(FrequencyGrid({0.0, 1.0}), Error);
  EXPECT_THROW(FrequencyGrid({0.0, 2.0, 1.0, kPi}), Error);
}

TEST(FreqResponse, PeakOfExampleEightPlant) {
  const StateSpace G = siso({0.0, 5.0});
  const Complex at_half_pi = freq_response(G, kPi / 2)(0, 0);
  EXPECT_NEAR(at_half_pi.real(), 0.25, 1e-14);
  EXPECT_NEAR(at_half_pi.imag(), 0.0, 1e-14);
  double peak = 0.0;
  for (double w : FrequencyGrid::uniform(4097).points()) peak = std::max(peak, std::abs(freq_response(G, w)(0, 0)));
  EXPECT_NEAR(peak, 0.25, 1e-12);
}

TEST(FreqResponse, StaticSystemIsConstant) {
  Matrix D(2, 1);
  D << 1.5, -2.0;
  const StateSpace G = StateSpace::static_gain(D);
  for (double w : {0.0, 0.3, 2.0, kPi}) {
    const CMatrix H = freq_response(G, w);
    EXPECT_EQ(H(0, 0), Complex(1.5, 0.0));
    EXPECT_EQ(H(1, 0), Complex(-2.0, 0.0));
  }
}

TEST(FreqResponse, MatchesPolynomialEvaluation) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace G = gen::stable_system(rng, 2, 1, 1, 0.9, false);
    for (int i = 0; i < 9; ++i) {
      const double w = kPi * i / 8.0;
      const Complex want = oracle::tf_eval(G.A(), G.B(), G.C(), G.D()(0, 0), std::polar(1.0, w));
      EXPECT_LT(std::abs(freq_response(G, w)(0, 0) - want), 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(FreqResponse, PoleOnCircleIsReported) {
  const StateSpace integrator(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  try {
    (void)freq_response(integrator, 0.0);
    FAIL() << "expected SingularResolvent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularResolvent);
  }
}

TEST(FreqResponse, ConjugateSymmetric) {
  const auto out = prop::for_all(100, 21, [](gen::Rng& rng, int) -> std::string {
    const StateSpace G = gen::stable_system(rng, gen::integer(rng, 1, 4), 2, 2, 0.95, false);
    const double w = gen::uniform(rng, 0.0, kPi);
    const CMatrix a = freq_response(G, w);
    const CMatrix b = freq_response(G, 2.0 * kPi - w);
    const double err = (a - b.conjugate()).cwiseAbs().maxCoeff();
    return err <= 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff()) ? "" : "mirror mismatch " + std::to_string(err);
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
}

TEST(Schur, TrivialCases) {
  EXPECT_TRUE(is_schur(Matrix::Zero(3, 3)).schur);
  for (int n = 1; n <= 4; ++n) EXPECT_FALSE(is_schur(Matrix::Identity(n, n)).schur);
  Matrix T(2, 2);
  T << 0.5, 1.0, 0.0, 0.9;
  const SchurReport r = is_schur(T);
  EXPECT_TRUE(r.schur);
  EXPECT_EQ(r.status, SchurStatus::Certified);
  EXPECT_LT(r.residual, 1e-9);
}

TEST(Schur, AgreesWithStepDownTest) {
  const auto out = prop::for_all(200, 22, [](gen::Rng& rng, int) -> std::string {
    const auto n = gen::integer(rng, 1, 4);
    const Matrix A = gen::matrix(rng, n, n, gen::uniform(rng, 0.2, 0.8));
    // Stay away from the unit circle, where both tests are ill-posed.
    const Eigen::VectorXcd eig = Eigen::EigenSolver<Matrix>(A).eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i)
      if (std::abs(std::abs(eig(i)) - 1.0) < 1e-3) return "";
    const bool want = oracle::jury_stable(oracle::char_poly(A));
    return is_schur(A).schur == want ? "" : std::string("disagree; step-down says ") + (want ? "stable" : "unstable");
  });
  EXPECT_TRUE(out.ok()) << out.first_failure;
}

TEST(SpectralRadius, ScalarThresholds) {
  const Matrix a = Matrix::Constant(1, 1, 0.9);
  EXPECT_TRUE(spectral_radius_below(a, 0.91));
  EXPECT_FALSE(spectral_radius_below(a, 0.89));
}

TEST(SpectralRadius, GradientDescentCenterLoop) {
  // A + c B C = (1 - c alpha) for the gradient step.
  const double alpha = 0.07;
  for (double c : {1.0, 5.5, 10.0}) {
    const double r = std::abs(1.0 - c * alpha);
    const Matrix closed = Matrix::Constant(1, 1, 1.0 - c * alpha);
    EXPECT_TRUE(spectral_radius_below(closed, r + 1e-3));
    EXPECT_FALSE(spectral_radius_below(closed, r - 1e-3));
  }
}

TEST(Simulate, IntegratorImpulse) {
  const StateSpace G(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  const Signal y = simulate(G, Signal::scalar({1, 0, 0, 0, 0}));
  const std::vector<double> want{0, 1, 1, 1, 1};
  for (int k = 0; k < 5; ++k) EXPECT_EQ(y(0, k), want[static_cast<std::size_t>(k)]);
}

TEST(Simulate, FirstOrderImpulseIsGeometric) {
  const double a = -0.7;
  const StateSpace G(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  std::vector<double> u(30, 0.0);
  u[0] = 1.0;
  const Signal y = simulate(G, Signal::scalar(u));
  EXPECT_EQ(y(0, 0), 0.0);
  for (int k = 1; k < 30; ++k) EXPECT_NEAR(y(0, k), std::pow(a, k - 1), 1e-15);
}

TEST(Simulate, MatchesConvolution) {
  gen::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace G = gen::stable_system(rng, 3, 2, 2, 0.9, false);
    const Signal u = gen::signal(rng, 2, 80);
    Vector x0 = gen::matrix(rng, 3, 1);
    const Signal y = simulate(G, u, x0);
    const Matrix want = oracle::convolve(G.A(), G.B(), G.C(), G.D(), u.samples(), x0);
    EXPECT_LT((y.samples() - want).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, want.cwiseAbs().maxCoeff()));
  }
}

TEST(Simulate, DimensionMismatch) {
  const StateSpace G = siso({0.5});
  EXPECT_THROW((void)simulate(G, Signal::zeros(2, 5)), Error);
  EXPECT_THROW((void)simulate(G, Signal::zeros(1, 5), Vector::Zero(3)), Error);
}

TEST(Lyapunov, ZeroDynamics) {
  Matrix Q(2, 2);
  Q << 2, 1, 1, 3;
  EXPECT_LT((solve_discrete_lyapunov(Matrix::Zero(2, 2), Q) - Q).norm(), 1e-14);
}

TEST(Lyapunov, ScalarClosedForm) {
  for (double a : {0.0, 0.5, -0.9, 0.99}) {
    const Matrix P = solve_discrete_lyapunov(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1));
    EXPECT_NEAR(P(0, 0), 1.0 / (1.0 - a * a), 1e-10 / (1.0 - a * a));
  }
}

TEST(Lyapunov, MatchesTruncatedSeries) {
  gen::Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const double radius = 0.8;
    const Matrix A = gen::stable_system(rng, 4, 1, 1, radius).A();
    Matrix Q = gen::matrix(rng, 4, 4);
    Q = Q * Q.transpose();
    const int K = 200;
    const Matrix P = solve_discrete_lyapunov(A, Q);
    const Matrix S = oracle::lyapunov_series(A, Q, K);
    // ||A^k|| <= radius^k, so the tail is bounded by ||Q|| radius^{2(K+1)} / (1 - radius^2).
    const double tail = Q.norm() * std::pow(radius, 2 * (K + 1)) / (1 - radius * radius);
    EXPECT_LT((P - S).norm(), tail + 1e-10 * P.norm());
    EXPECT_LT((A.transpose() * P * A - P + Q).norm(), 1e-8 * Q.norm());
  }
}

TEST(Lyapunov, UnitCircleProductIsSingular) {
  try {
    (void)solve_discrete_lyapunov(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    FAIL() << "expected SingularSylvester";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSylvester);
  }
}

}  // namespace
