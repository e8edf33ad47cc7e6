#include <benchmark/benchmark.h>

#include "mesoent/noise.hpp"
#include "mesoent/pt_moments.hpp"
#include "mesoent/quadrature.hpp"
#include "mesoent/scan.hpp"

using namespace mesoent;

namespace {

void BM_PtMomentIdeal(benchmark::State& state) {
  const DetectionRecord rec{int(state.range(0)), int(state.range(0))};
  for (auto _ : state) {
    Rational moment = pt_moment_ideal(6, 6, rec);
    benchmark::DoNotOptimize(moment);
  }
}
BENCHMARK(BM_PtMomentIdeal)->Arg(10)->Arg(100)->Arg(400);

void BM_ExactVerdict(benchmark::State& state) {
  const TensorFunctionSpec spec = TensorFunctionSpec::parse("1,2,3,4");
  const DetectionRecord rec{int(state.range(0)), int(state.range(0))};
  for (auto _ : state) {
    bool detected = verdict(build_pt_matrix(spec, rec, Ideal{})).entangled_detected;
    benchmark::DoNotOptimize(detected);
  }
}
BENCHMARK(BM_ExactVerdict)->Arg(13)->Arg(444);

void BM_GaussianVerdict(benchmark::State& state) {
  const TensorFunctionSpec spec = TensorFunctionSpec::parse("1,2,3,4");
  const DetectionRecord rec{int(state.range(0)), int(state.range(0))};
  const NoiseModel model = DetectorGaussian{6.0, 6.0};
  for (auto _ : state) {
    bool detected = verdict(build_pt_matrix(spec, rec, model)).entangled_detected;
    benchmark::DoNotOptimize(detected);
  }
}
BENCHMARK(BM_GaussianVerdict)->Arg(50)->Arg(200);

void BM_GaussianFallingMoments(benchmark::State& state) {
  for (auto _ : state) {
    auto moments = gaussian_falling_moments(int(state.range(0)), 6.0, 12);
    benchmark::DoNotOptimize(moments);
  }
}
BENCHMARK(BM_GaussianFallingMoments)->Arg(50)->Arg(200);

void BM_FindMaxNIdeal(benchmark::State& state) {
  const TensorFunctionSpec spec = TensorFunctionSpec::parse("1,2,3");
  for (auto _ : state) {
    auto window = find_max_n(spec, Ideal{});
    benchmark::DoNotOptimize(window);
  }
}
BENCHMARK(BM_FindMaxNIdeal);

void BM_SchrodingerOracle(benchmark::State& state) {
  const DetectionRecord rec{int(state.range(0)), int(state.range(0))};
  for (auto _ : state) {
    Rational moment = schrodinger_oracle_moment(6, 6, rec, Ideal{});
    benchmark::DoNotOptimize(moment);
  }
}
BENCHMARK(BM_SchrodingerOracle)->Arg(8)->Arg(20);

void BM_HomodyneDraw(benchmark::State& state) {
  const HomodyneSampler sampler({M_SQRT1_2, M_SQRT1_2});
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto samples = sampler.draw(std::size_t(state.range(0)), seed++);
    benchmark::DoNotOptimize(samples);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HomodyneDraw)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
