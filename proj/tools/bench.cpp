// bench: cell updates per second, naive reference vs bit-parallel kernel.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <memory>
#include <random>

#include "cli.hpp"
#include "lifespec/engine.hpp"

namespace lifespec::cli {
namespace {

using Clock = std::chrono::steady_clock;

struct BenchArgs {
  std::vector<std::int64_t> sizes{1024, 4096};
  std::vector<unsigned> workers{1, default_workers()};
  std::uint64_t steps = 100;
  double max_seconds = 2.0;
  double density = 0.35;
  std::uint64_t seed = 1;
  bool verify = false;
};

Universe soup(std::int64_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution alive(density);
  Universe u(n, n);
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x)
      if (alive(rng)) u.set(x, y, true);
  return u;
}

struct Rate {
  std::uint64_t steps;
  double seconds;
  double cells_per_s;
};

// Steps until `steps` are done or the time budget is spent, at least two.
Rate measure(const Universe& start, Kernel kernel, unsigned workers, std::uint64_t steps, double budget) {
  Engine e(EngineOptions{kernel, workers});
  Universe a = start, b;
  e.step_into(a, b);
  const auto t0 = Clock::now();
  std::uint64_t done = 0;
  double el = 0;
  while (done < steps) {
    e.step_into(a, b);
    std::swap(a, b);
    ++done;
    el = std::chrono::duration<double>(Clock::now() - t0).count();
    if (done >= 2 && el > budget) break;
  }
  const double cells = static_cast<double>(start.width()) * static_cast<double>(start.height());
  return {done, el, cells * static_cast<double>(done) / el};
}

// Bit-parallel stepping against the naive kernel on small random fields.
bool verify(unsigned workers, std::uint64_t seed) {
  Engine e(EngineOptions{Kernel::BitParallel, workers});
  for (int k = 0; k < 16; ++k) {
    const std::int64_t w = 64 + 13 * k, h = 128 - 5 * k;
    std::mt19937_64 rng(seed + k);
    std::bernoulli_distribution alive(0.1 + 0.025 * k);
    Universe u(w, h);
    for (std::int64_t y = 0; y < h; ++y)
      for (std::int64_t x = 0; x < w; ++x)
        if (alive(rng)) u.set(x, y, true);
    Universe ref = u;
    for (int t = 0; t < 64; ++t) {
      u = e.step(u);
      ref = reference_step(ref);
      if (!u.same_cells(ref)) return false;
    }
  }
  return true;
}

void run_bench(const BenchArgs& a) {
  if (a.verify) {
    const unsigned w = *std::max_element(a.workers.begin(), a.workers.end());
    const bool ok = verify(w, a.seed);
    std::printf("verify: %s (16 random fields x 64 steps, bit-parallel with %u workers vs naive)\n",
                ok ? "pass" : "FAIL", w);
    if (!ok) {
      g_exit_status = 1;
      return;
    }
  }
  std::vector<unsigned> workers = a.workers;
  std::sort(workers.begin(), workers.end());
  workers.erase(std::unique(workers.begin(), workers.end()), workers.end());

  std::printf("%-13s %-11s %-8s %-7s %-9s %s\n", "kernel", "size", "workers", "steps", "seconds", "cells/s");
  struct Row {
    std::int64_t size;
    unsigned workers;
    double naive, fast;
  };
  std::vector<Row> rows;
  for (auto n : a.sizes) {
    const auto start = soup(n, a.density, a.seed);
    const std::string size = std::to_string(n) + "x" + std::to_string(n);
    for (auto w : workers) {
      Row row{n, w, 0, 0};
      for (auto k : {Kernel::Reference, Kernel::BitParallel}) {
        const auto r = measure(start, k, w, a.steps, a.max_seconds);
        (k == Kernel::Reference ? row.naive : row.fast) = r.cells_per_s;
        std::printf("%-13s %-11s %-8u %-7llu %-9.3f %.3e\n", k == Kernel::Reference ? "naive" : "bit-parallel",
                    size.c_str(), w, (unsigned long long)r.steps, r.seconds, r.cells_per_s);
        std::fflush(stdout);
      }
      rows.push_back(row);
    }
  }
  for (const auto& r : rows)
    std::printf("ratio %lldx%lld workers=%u: %.1f\n", (long long)r.size, (long long)r.size, r.workers, r.fast / r.naive);
}

}  // namespace

void add_bench(CLI::App& app) {
  auto a = std::make_shared<BenchArgs>();
  auto* sub = app.add_subcommand("bench", "Throughput of the naive and bit-parallel kernels");
  sub->add_option("--sizes", a->sizes, "Square field edge lengths")->delimiter(',')->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--workers", a->workers, "Worker counts, one row per kernel each")->delimiter(',')
      ->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--steps", a->steps, "Generations per measurement")->capture_default_str();
  sub->add_option("--max-seconds", a->max_seconds, "Time budget per measurement")->capture_default_str();
  sub->add_option("--density", a->density, "Initial soup density")->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--seed", a->seed, "Soup seed")->capture_default_str();
  sub->add_flag("--verify", a->verify, "Check the kernels agree before timing");
  sub->callback([a] { run_bench(*a); });
}

}  // namespace lifespec::cli
