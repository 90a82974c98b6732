#include <benchmark/benchmark.h>

#include <random>

#include "lifespec/analyzer.hpp"
#include "lifespec/engine.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"
#include "lifespec/register_machine.hpp"
#include "lifespec/spectral.hpp"

using namespace lifespec;

namespace {

Universe soup(std::int64_t n, double density = 0.35) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution alive(density);
  Universe u(n, n);
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x)
      if (alive(rng)) u.set(x, y, true);
  return u;
}

// args: edge length, workers
template <Kernel K>
void BM_Step(benchmark::State& state) {
  const auto n = state.range(0);
  Engine e(EngineOptions{K, static_cast<unsigned>(state.range(1))});
  Universe a = soup(n), b;
  for (auto _ : state) {
    e.step_into(a, b);
    std::swap(a, b);
  }
  state.counters["cells/s"] =
      benchmark::Counter(static_cast<double>(n * n), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Step<Kernel::BitParallel>)->Args({1024, 1})->Args({1024, 4})->Args({4096, 1})->Args({4096, 4})
    ->UseRealTime();
BENCHMARK(BM_Step<Kernel::Reference>)->Args({1024, 1})->Args({1024, 4})->UseRealTime();

spectral::CellSeries random_series(std::uint64_t T) {
  std::mt19937_64 rng(7);
  std::bernoulli_distribution bit(0.3);
  std::vector<std::uint8_t> s(T);
  for (auto& v : s) v = bit(rng);
  return spectral::CellSeries::from_bits(0, 0, s);
}

// Full one-sided transform through the FFT.
void BM_CellDftExact(benchmark::State& state) {
  const auto T = static_cast<std::uint64_t>(state.range(0));
  const auto series = random_series(T);
  const auto freqs = spectral::FrequencySet::one_sided(T);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::cell_dft(series, freqs));
}
BENCHMARK(BM_CellDftExact)->Arg(4096)->Arg(65536);

// Probe bins from runs of ones.
void BM_CellDftProbe(benchmark::State& state) {
  const auto T = static_cast<std::uint64_t>(state.range(0));
  const auto series = random_series(T);
  const std::vector<std::uint32_t> periods{30, 60};
  const auto freqs = spectral::FrequencySet::probe(T, 100, periods);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::cell_dft(series, freqs));
}
BENCHMARK(BM_CellDftProbe)->Arg(4096)->Arg(65536);

void BM_FitPowerLaw(benchmark::State& state) {
  spectral::SectorSpectrum s;
  s.freqs = spectral::FrequencySet::one_sided(65536);
  s.n_cells = 2500;
  for (std::size_t f = 0; f < s.freqs->size(); ++f) s.power.push_back(1.0 / (1.0 + static_cast<double>(f)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::fit_power_law(s, 1, 100));
}
BENCHMARK(BM_FitPowerLaw);

// Whole pipeline on the period-60 fixture, 2 x 2 sectors.
void BM_AnalyzeGun60(benchmark::State& state) {
  const auto u = place(parse_rle(read_file(LIFESPEC_BENCH_DATA "/gun60.rle")));
  spectral::AnalysisConfig cfg;
  cfg.window = static_cast<std::uint64_t>(state.range(0));
  cfg.roi = {kDefaultMargin, kDefaultMargin, 100, 100};
  cfg.mode = state.range(1) ? spectral::AnalysisMode::Probe : spectral::AnalysisMode::Exact;
  for (auto _ : state) benchmark::DoNotOptimize(spectral::analyze(u, cfg));
}
BENCHMARK(BM_AnalyzeGun60)->Args({4096, 0})->Args({4096, 1})->Unit(benchmark::kMillisecond);

void BM_EncodeUrm(benchmark::State& state) {
  const auto p = rm::Program::parse(read_file(LIFESPEC_BENCH_DATA "/add.rm"));
  const std::vector<std::uint64_t> regs{1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(rm::encode_urm(p, regs));
}
BENCHMARK(BM_EncodeUrm);

}  // namespace

BENCHMARK_MAIN();
