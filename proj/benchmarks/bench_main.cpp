#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "r3val/corpus.hpp"
#include "r3val/schedule.hpp"
#include "r3val/simulator.hpp"
#include "r3val/spectral.hpp"
#include "r3val/stats.hpp"

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(mean, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

void BM_WilcoxonExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normal_sample(n, 0.3, 1);
  const auto b = normal_sample(n, 0.0, 2);
  for (auto _ : state) {
    auto r = r3v::stats::wilcoxon_rank_sum(a, b, r3v::stats::Alternative::kTwoSided,
                                           r3v::stats::Method::kExact);
    benchmark::DoNotOptimize(r.p_value);
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(7)->Arg(15)->Arg(25);

void BM_WilcoxonNormal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normal_sample(n, 0.3, 1);
  const auto b = normal_sample(n, 0.0, 2);
  for (auto _ : state) {
    auto r = r3v::stats::wilcoxon_rank_sum(a, b, r3v::stats::Alternative::kTwoSided,
                                           r3v::stats::Method::kNormalApprox);
    benchmark::DoNotOptimize(r.p_value);
  }
}
BENCHMARK(BM_WilcoxonNormal)->Arg(33)->Arg(1000);

void BM_A12(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normal_sample(n, 0.3, 1);
  const auto b = normal_sample(n, 0.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(r3v::stats::a12(a, b));
}
BENCHMARK(BM_A12)->Arg(33)->Arg(10000);

void BM_Periodogram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> series(n);
  for (std::size_t i = 0; i < n; ++i) series[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 200.0);
  for (auto _ : state) {
    auto s = r3v::spectral::periodogram(series);
    benchmark::DoNotOptimize(s.power.data());
  }
}
BENCHMARK(BM_Periodogram)->Arg(200)->Arg(4096)->Arg(100000);

void BM_GenerateSchedule(benchmark::State& state) {
  r3v::ScheduleConfig config;
  const auto n_variants = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < n_variants; ++i) config.variants.emplace_back("v" + std::to_string(i));
  config.pi = 3;
  config.n_samples = config.pi * n_variants;
  for (auto _ : state) {
    auto s = r3v::generate_schedule(config, r3v::Approach::kR3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_GenerateSchedule)->Arg(11)->Arg(200);

void BM_SimulateCorpus(benchmark::State& state) {
  const auto params = r3v::DeviceParams::defaults();
  const r3v::VariantId variant("original");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto c = r3v::simulate_corpus(params, variant, 7, 7, ++seed, "bench");
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_SimulateCorpus);

}  // namespace
BENCHMARK_MAIN();
