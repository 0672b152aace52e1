#include "generators.hpp"
#include "oracles.hpp"

#include "iqcrate/fdi.hpp"
#include "iqcrate/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace iqcrate;

namespace {

StateSpace all_pass_plant() {
  // 3(1 - 2z)/(z - 2): |G| = 3 on the unit circle.
  return {Matrix::Constant(1, 1, 2.0), Matrix::Ones(1, 1), Matrix::Constant(1, 1, -9.0), Matrix::Constant(1, 1, -6.0)};
}

StateSpace resonant_plant() {
  // 1 / (z^2 - 1.8 z + 0.82), poles 0.9 +- 0.1j.
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 1.8, -0.82, 1.0, 0.0;
  B << 1.0, 0.0;
  C << 0.0, 1.0;
  return {A, B, C, Matrix::Zero(1, 1)};
}

Matrix diag2(double a, double b) {
  Matrix P = Matrix::Zero(2, 2);
  P(0, 0) = a;
  P(1, 1) = b;
  return P;
}

TEST(FdiMargin, AllPassPlantIsFlat) {
  const CoprimePair pair = rcf(all_pass_plant(), Rate(1.0));
  const FdiReport r = fdi_margin(pair, constant_provider(diag2(-1.0, 1.0)), FrequencyGrid::uniform(257));
  EXPECT_LT(r.margin, 0.0);
  EXPECT_TRUE(r.certified());
  for (const FdiPoint& p : r.points) {
    const double m2 = std::norm(freq_response(pair.M, p.omega)(0, 0));
    EXPECT_NEAR(p.lambda_max / m2, -8.0, 1e-10);
  }
}

TEST(FdiMargin, ZeroMultiplierIsNotCertified) {
  const CoprimePair pair = rcf(all_pass_plant(), Rate(1.0));
  const FdiReport r = fdi_margin(pair, constant_provider(Matrix::Zero(2, 2)), FrequencyGrid::uniform(33));
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_FALSE(r.certified());
}

TEST(FdiMargin, MatchesScalarExpansion) {
  gen::Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace G = gen::any_system(rng, gen::integer(rng, 1, 3), 1, 1);
    const double rho = gen::uniform(rng, 0.7, 1.0);
    const CoprimePair pair = rcf(G, Rate(rho));
    const ZamesFalbFir zf = gen::valid_multiplier(rng, gen::integer(rng, 0, 5), rho);
    const double m = gen::uniform(rng, 0.0, 2.0);
    const SectorBounds s(m, m + gen::uniform(rng, 0.5, 10.0));
    std::vector<double> pts;
    for (int i = 0; i < 15; ++i) pts.push_back(kPi * i / 15.0);
    pts.push_back(kPi);
    const FdiReport r = fdi_margin(pair, zames_falb_provider(zf, s), FrequencyGrid(pts));
    ASSERT_EQ(r.points.size(), 16u);
    for (const FdiPoint& p : r.points) {
      const Complex n = freq_response(pair.N, p.omega)(0, 0);
      const Complex mm = freq_response(pair.M, p.omega)(0, 0);
      const double want = oracle::zf_scalar_fdi(n, mm, oracle::fir_sum(zf.taps(), p.omega), s.m, s.L);
      EXPECT_NEAR(p.lambda_max, want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(FdiMargin, MarginIsGridMaximum) {
  gen::Rng rng(62);
  const StateSpace G = gen::stable_system(rng, 3, 1, 1, 0.9);
  const CoprimePair pair = rcf(G, Rate(1.0));
  const FdiReport r = fdi_margin(pair, constant_provider(diag2(0.5, -1.0)), FrequencyGrid::uniform(129));
  double worst = -std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (const FdiPoint& p : r.points)
    if (p.lambda_max > worst) worst = p.lambda_max, at = p.omega;
  EXPECT_EQ(r.margin, worst);
  EXPECT_EQ(r.argmax, at);
  EXPECT_EQ(r.grid(), FrequencyGrid::uniform(129).points());
}

TEST(FdiMargin, MirroredHalfIsRedundant) {
  gen::Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace G = gen::any_system(rng, 3, 2, 2);
    const CoprimePair pair = rcf(G, Rate(0.9));
    Matrix pi = gen::matrix(rng, 4, 4);
    pi = (pi + pi.transpose()).eval();
    const PiProvider provider = constant_provider(pi);
    for (int i = 0; i < 20; ++i) {
      const double w = gen::uniform(rng, 0.0, kPi);
      const double a = linalg::lambda_max_hermitian(fdi_matrix(pair.stacked(), provider, w));
      const double b = linalg::lambda_max_hermitian(fdi_matrix(pair.stacked(), provider, 2.0 * kPi - w));
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(FdiMargin, PositiveScalingPreservesSign) {
  gen::Rng rng(64);
  const StateSpace G = gen::stable_system(rng, 2, 1, 1, 0.8);
  const CoprimePair pair = rcf(G, Rate(1.0));
  const ZamesFalbFir zf = gen::valid_multiplier(rng, 3, 1.0);
  const SectorBounds s(0.5, 4.0);
  const FrequencyGrid grid = FrequencyGrid::uniform(65);
  const FdiReport base = fdi_margin(pair, zames_falb_provider(zf, s), grid);
  for (double c : {0.01, 3.0, 250.0}) {
    const PiProvider scaled = [&, c](double w) -> CMatrix { return c * assemble_pi(zf, s, w); };
    const FdiReport r = fdi_margin(pair, scaled, grid);
    EXPECT_EQ(r.certified(0.0), base.certified(0.0));
    for (std::size_t i = 0; i < r.points.size(); ++i)
      EXPECT_NEAR(r.points[i].lambda_max, c * base.points[i].lambda_max, 1e-10 * c * (1.0 + std::abs(base.margin)));
  }
}

TEST(FdiMargin, ThreadCountDoesNotChangeResult) {
  gen::Rng rng(65);
  const StateSpace G = gen::any_system(rng, 4, 1, 1);
  const CoprimePair pair = rcf(G, Rate(0.95));
  const PiProvider provider = zames_falb_provider(gen::valid_multiplier(rng, 4, 0.95), SectorBounds(1.0, 10.0));
  const FrequencyGrid grid = FrequencyGrid::uniform(1024);
  const FdiReport one = fdi_margin(pair, provider, grid, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const FdiReport many = fdi_margin(pair, provider, grid, t);
    EXPECT_EQ(many.margin, one.margin);
    EXPECT_EQ(many.argmax, one.argmax);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(many.points[i].lambda_max, one.points[i].lambda_max);
  }
}

TEST(FdiMargin, RejectsWrongMultiplierSize) {
  const CoprimePair pair = rcf(all_pass_plant(), Rate(1.0));
  try {
    (void)fdi_margin(pair, constant_provider(Matrix::Identity(3, 3)), FrequencyGrid::uniform(8));
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Refine, FlatResponseBarelyMoves) {
  const CoprimePair pair = rcf(all_pass_plant(), Rate(1.0));
  const PiProvider provider = [&](double w) -> CMatrix {
    // Normalize by |M|^2 so the form is exactly constant.
    const double m2 = std::norm(freq_response(pair.M, w)(0, 0));
    return CMatrix(diag2(-1.0, 1.0).cast<Complex>() / m2);
  };
  const FdiReport coarse = fdi_margin(pair, provider, FrequencyGrid::uniform(64));
  const FdiReport fine = refine_near_minimum(coarse, pair, provider, 8);
  EXPECT_GT(fine.points.size(), coarse.points.size());
  EXPECT_LT(std::abs(fine.margin - coarse.margin), 1e-12);
}

TEST(Refine, ResonanceWorsensCoarseMargin) {
  const CoprimePair pair = rcf(resonant_plant(), Rate(1.0));
  const PiProvider provider = constant_provider(diag2(0.04, -1.0));
  const FdiReport coarse = fdi_margin(pair, provider, FrequencyGrid::uniform(32));
  const FdiReport refined = refine_near_minimum(coarse, pair, provider, 16);
  const FdiReport dense = fdi_margin(pair, provider, FrequencyGrid::uniform(4096));
  EXPECT_GT(refined.margin, coarse.margin);
  EXPECT_GT(dense.margin, coarse.margin);
  // The refined grid lands much closer to the dense value than the coarse one.
  EXPECT_LT(dense.margin - refined.margin, 0.25 * (dense.margin - coarse.margin));
}

TEST(Refine, FactorOneIsIdentity) {
  const CoprimePair pair = rcf(resonant_plant(), Rate(1.0));
  const PiProvider provider = constant_provider(diag2(0.04, -1.0));
  const FdiReport coarse = fdi_margin(pair, provider, FrequencyGrid::uniform(32));
  const FdiReport same = refine_near_minimum(coarse, pair, provider, 1);
  EXPECT_EQ(same.margin, coarse.margin);
  EXPECT_EQ(same.points.size(), coarse.points.size());
}

TEST(FdiCsv, HeaderAndRows) {
  const CoprimePair pair = rcf(all_pass_plant(), Rate(1.0));
  const FdiReport r = fdi_margin(pair, constant_provider(diag2(-1.0, 1.0)), FrequencyGrid::uniform(5));
  std::ostringstream os;
  write_fdi_csv(r, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "omega,lambda_max");
  int rows = 0;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    ASSERT_NE(comma, std::string::npos);
    EXPECT_EQ(std::stod(line.substr(comma + 1)), r.points[static_cast<std::size_t>(rows)].lambda_max);
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}

}  // namespace
