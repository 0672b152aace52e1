#include "iqcrate/certifier.hpp"
#include "iqcrate/fdi.hpp"
#include "iqcrate/lmi.hpp"
#include "iqcrate/lurye.hpp"
#include "iqcrate/methods.hpp"
#include "iqcrate/synthesis.hpp"

#include <benchmark/benchmark.h>

using namespace iqcrate;

namespace {

StateSpace heavy_ball_plant(int d = 1) {
  MethodSpec spec;
  spec.kind = MethodKind::HeavyBall;
  spec.alpha = 0.1;
  spec.beta = 0.2;
  spec.dimension = d;
  return method_to_lurye(spec).G;
}

void BM_FreqResponse(benchmark::State& state) {
  const StateSpace G = heavy_ball_plant(static_cast<int>(state.range(0)));
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(freq_response(G, w));
    w += 1e-3;
  }
}
BENCHMARK(BM_FreqResponse)->Arg(1)->Arg(4)->Arg(16);

void BM_FdiMargin(benchmark::State& state) {
  const CoprimePair pair = rcf(heavy_ball_plant(), Rate(0.9));
  const PiProvider pi = zames_falb_provider(ZamesFalbFir({-0.05, -0.1, 1.0, -0.1, -0.05}), SectorBounds(1.0, 10.0));
  const FrequencyGrid grid = FrequencyGrid::uniform(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fdi_margin(pair, pi, grid).margin);
}
BENCHMARK(BM_FdiMargin)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Synthesis(benchmark::State& state) {
  const double rho = 0.88;
  const CoprimePair pair = rcf(heavy_ball_plant(), Rate(rho));
  SynthesisConfig cfg;
  cfg.half_order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_multiplier(pair, SectorBounds(1.0, 10.0), Rate(rho), cfg));
}
BENCHMARK(BM_Synthesis)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_CertifyHeavyBall(benchmark::State& state) {
  const StateSpace G = heavy_ball_plant();
  for (auto _ : state) benchmark::DoNotOptimize(certify_rate(G, SlopeRestricted{SectorBounds(1.0, 10.0)}));
}
BENCHMARK(BM_CertifyHeavyBall)->Unit(benchmark::kMillisecond);

void BM_SimulateLurye(benchmark::State& state) {
  const StateSpace G = heavy_ball_plant();
  const auto delta = NonlinearityDescriptor::saturation(1.0);
  const Eigen::Index horizon = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_lurye(G, delta, Signal(), Signal(), Vector::Ones(2), horizon));
}
BENCHMARK(BM_SimulateLurye)->Arg(300)->Arg(3000);

void BM_Subgradient(benchmark::State& state) {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.5, -0.3, 1.0, 0.0;
  B << 1.0, 0.0;
  C << 0.0, 1.0;
  const StateSpace G(A, B, C, Matrix::Zero(1, 1));
  const KypLmi lmi = build_kyp_lmi(G, rcf(G, Rate(1.0)), psi_static(static_gain_pi(0.6)));
  SubgradientOptions opts;
  opts.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_p_subgradient(lmi, opts).lambda_max);
}
BENCHMARK(BM_Subgradient)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
