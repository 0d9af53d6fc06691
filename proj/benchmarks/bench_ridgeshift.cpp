#include <benchmark/benchmark.h>

#include "ridgeshift/asymptotic_risk.hpp"
#include "ridgeshift/finite_sample.hpp"
#include "ridgeshift/sweep_engine.hpp"

using namespace ridgeshift;

static void BM_SolveStateTwoScale(benchmark::State& state) {
  const auto spectrum = two_scale_spectrum();
  const double lambda = std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_state(spectrum, 2.0, lambda).nu);
}
BENCHMARK(BM_SolveStateTwoScale)->DenseRange(-8, 2, 2);

static void BM_AsymptoticRisk(benchmark::State& state) {
  ProblemSpec p = two_scale_problem({1.0, 1.0}, {0.5, 1.0});
  p.penalty = Penalty::fixed(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_risk(p).risk);
}
BENCHMARK(BM_AsymptoticRisk);

static void BM_OptimalLambda(benchmark::State& state) {
  const auto spectrum = two_scale_spectrum();
  for (auto _ : state) benchmark::DoNotOptimize(optimal_lambda(spectrum, 1.0, 1.0));
}
BENCHMARK(BM_OptimalLambda);

static void BM_ConditionalRisk(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto one = SpectralModel::isotropic();
  const auto coeffs = build_coefficients(one, ShiftSpec::identity(one), dim, 1);
  const auto data = sample_dataset(one, coeffs.beta, 1.0, dim, dim, 1);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_risk(data, coeffs, 1.0, 1.0).bias);
}
BENCHMARK(BM_ConditionalRisk)->RangeMultiplier(2)->Range(64, 512);

static void BM_McSeed(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto one = SpectralModel::isotropic();
  const ShiftSpec shift({{0.5, 1.0}}, one);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto coeffs = build_coefficients(one, shift, dim, seed);
    const auto data = sample_dataset(one, coeffs.beta, 1.0, dim, dim, seed);
    benchmark::DoNotOptimize(conditional_risk(data, coeffs, 1.0, 1.0).bias);
    ++seed;
  }
}
BENCHMARK(BM_McSeed)->Arg(256);

BENCHMARK_MAIN();
