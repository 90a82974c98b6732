// Acceptance checks: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail ID]... [--only ID]...
//
// Exit status is 0 when the failing set equals the expected-fail set, so a
// documented deviation that starts passing is reported too.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "golden_fixtures.hpp"
#include "lifespec/analyzer.hpp"
#include "lifespec/classifier.hpp"
#include "lifespec/engine.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"
#include "lifespec/register_machine.hpp"
#include "lifespec/render.hpp"
#include "support.hpp"

using namespace lifespec;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::uint64_t fingerprint(const Universe& u) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto w : u.words()) h = (h ^ w) * 1099511628211ull;
  return h;
}

// 1. Bit-parallel vs naive, every step.
Outcome engine_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  Engine fast;
  Engine slow(EngineOptions{Kernel::Reference, 1});
  for (int trial = 0; trial < 200; ++trial) {
    const double density = 0.1 + 0.4 * trial / 199.0;
    Universe a = testsupport::random_universe(128, 128, density, rng);
    Universe b = a, na, nb;
    for (int t = 0; t < 256; ++t) {
      fast.step_into(a, na);
      slow.step_into(b, nb);
      std::swap(a, na);
      std::swap(b, nb);
      if (!(a == b)) return {false, fmt("universe %d diverged at step %d", trial, t + 1)};
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 120, fmt("200 x 128^2 x 256 steps identical, %.1f s (limit 120 s)", secs)};
}

// 2. Worker counts give identical runs.
Outcome engine_determinism() {
  std::mt19937_64 rng(2);
  const auto soup = testsupport::random_universe(1024, 1024, 0.35, rng);
  std::vector<std::uint64_t> reference;
  for (unsigned w : {1u, 2u, 4u, 8u}) {
    Engine e(EngineOptions{Kernel::BitParallel, w});
    std::vector<std::uint64_t> prints;
    prints.reserve(1000);
    e.run(soup, 1000, [&](const StepView& v) { prints.push_back(fingerprint(v.current)); });
    if (reference.empty()) reference = prints;
    else if (prints != reference) return {false, fmt("workers=%u differs from workers=1", w)};
  }
  return {true, "1024^2 soup, 1000 steps, per-step fingerprints equal for workers 1,2,4,8"};
}

// 3. Canonical patterns.
Outcome canonical_patterns() {
  Engine e;
  const auto advance = [&](Universe u, int n) { return e.run(std::move(u), n).universe; };

  const auto block = place(parse_rle("x = 2, y = 2\n2o$2o!"), 4);
  if (!advance(block, 1).same_cells(block)) return {false, "block changed"};

  const auto blinker = place(testsupport::load_pattern("blinker.rle"), 4);
  if (advance(blinker, 1).same_cells(blinker) || !advance(blinker, 2).same_cells(blinker))
    return {false, "blinker is not period 2"};

  const auto glider = testsupport::load_pattern("glider.rle");
  Universe g(32, 32), shifted(32, 32);
  for (auto c : glider.live_cells) {
    g.set(c.x + 4, c.y + 4, true);
    shifted.set(c.x + 5, c.y + 5, true);
  }
  for (int k = 0; k < 5; ++k) {
    g = advance(g, 4);
    if (!g.same_cells(shifted)) return {false, fmt("glider off course after %d steps", 4 * (k + 1))};
    Universe next(32, 32);
    for (auto c : extract(shifted).live_cells) next.set(c.x + 1, c.y + 1, true);
    shifted = next;
  }

  auto gun = place(testsupport::load_pattern("gosper_gun.rle"), 200);
  for (int k = 1; k <= 20; ++k) {
    gun = advance(std::move(gun), 30);
    if (gun.population() != 36 + 5u * k)
      return {false, fmt("gun population %llu at t = %d, expected %d", (unsigned long long)gun.population(), 30 * k,
                         36 + 5 * k)};
  }
  return {true, "block fixed, blinker p2, glider (+1,+1)/4, gun 36 + 5k at t = 30k for k = 1..20"};
}

// 4. Fast transform vs direct sum, and Parseval.
Outcome dft_oracle() {
  std::mt19937_64 rng(4);
  double worst = 0, worst_parseval = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t T = i % 2 ? 256 : 64;
    const auto bits = testsupport::random_series(T, std::uniform_real_distribution<double>(0.02, 0.98)(rng), rng);
    const auto s = spectral::CellSeries::from_bits(0, 0, bits);
    const auto freqs = spectral::FrequencySet::one_sided(T);
    const auto a = spectral::cell_dft(s, freqs).amplitudes;
    // Errors are relative to the largest component, s_hat(0).
    const double scale = std::max(std::abs(a[0]), 1.0 / double(T));
    for (std::size_t f = 0; f <= T / 2; ++f)
      worst = std::max(worst, std::abs(a[f] - testsupport::direct_dft(bits, f)) / scale);
    double sum = std::norm(a[0]) + std::norm(a[T / 2]);
    for (std::size_t f = 1; f < T / 2; ++f) sum += 2 * std::norm(a[f]);
    // With the 1/T normalisation the full-spectrum sum is ones / T.
    const double expected = double(s.count_ones()) / double(T);
    if (expected > 0) worst_parseval = std::max(worst_parseval, std::abs(sum - expected) / expected);
  }
  return {worst <= 1e-9 && worst_parseval <= 1e-9,
          fmt("1000 series (T = 64, 256): max rel error %.2e, Parseval %.2e (limit 1e-9)", worst, worst_parseval)};
}

// 5. Power-law fit recovery and sigma^2 oracle.
Outcome fit_recovery() {
  double worst_beta = 0, worst_sigma = 0;
  for (double beta : {-0.2, -1.0, -2.0}) {
    std::vector<double> f, p;
    for (int k = 1; k <= 100; ++k) {
      f.push_back(k);
      p.push_back(0.01 * std::pow(k, beta));
    }
    const auto fit = spectral::fit_power_law(f, p);
    worst_beta = std::max(worst_beta, std::abs(fit.beta - beta));
    worst_sigma = std::max(worst_sigma, fit.sigma2);
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0, 0.5);
  double worst_oracle = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f, p, x, y;
    for (int k = 1; k <= 100; ++k) {
      const double lp = -0.7 - 1.3 * std::log(k) + noise(rng);
      f.push_back(k);
      p.push_back(std::exp(lp));
      x.push_back(std::log(k));
      y.push_back(lp);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 100; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double b = (100 * sxy - sx * sy) / (100 * sxx - sx * sx);
    const double a = (sy - b * sx) / 100;
    double ss = 0;
    for (int i = 0; i < 100; ++i) ss += (y[i] - a - b * x[i]) * (y[i] - a - b * x[i]);
    worst_oracle = std::max(worst_oracle, std::abs(spectral::fit_power_law(f, p).sigma2 - ss / 100));
  }
  return {worst_beta <= 1e-6 && worst_sigma <= 1e-9 && worst_oracle <= 1e-6,
          fmt("beta error %.1e (1e-6), sigma2 %.1e (1e-9), perturbed sigma2 vs oracle %.1e (1e-6)", worst_beta,
              worst_sigma, worst_oracle)};
}

spectral::AnalysisConfig gun_config(const Pattern& p) {
  spectral::AnalysisConfig cfg;
  cfg.window = 4096;
  cfg.roi = {kDefaultMargin, kDefaultMargin, (p.width + 49) / 50 * 50, (p.height + 49) / 50 * 50};
  return cfg;
}

// 6a. Whole period-30 gun in one sector.
Outcome gun30_signature() {
  const auto p = testsupport::load_pattern("gun30.rle");
  const auto cfg = gun_config(p);
  const auto r = spectral::analyze(place(p), cfg, {4});
  const auto& s = r.sector(0, 0);
  const auto v = judge(s, ClassifierConfig::from(cfg));
  const bool ok = v.cls == SectorClass::SharpPeaks && v.peak_bin && (*v.peak_bin == 136 || *v.peak_bin == 137);
  return {ok, fmt("class %s, dominant bin %u (want 136/137); S(136) = %.3e, S(137) = %.3e, S(273) = %.3e",
                  std::string(to_string(v.cls)).c_str(), v.peak_bin.value_or(0), s.at(136), s.at(137), s.at(273))};
}

// 6b. Period-60 collision sector of the two-gun fixture.
Outcome gun60_signature() {
  const auto p = testsupport::load_pattern("gun60.rle");
  const auto cfg = gun_config(p);
  const auto r = spectral::analyze(place(p), cfg, {4});
  const auto v = judge(r.sector(0, 1), ClassifierConfig::from(cfg));
  const bool ok = v.cls == SectorClass::SharpPeaks && v.peak_bin && (*v.peak_bin == 68 || *v.peak_bin == 69);
  return {ok, fmt("sector (0,1): class %s, dominant bin %u (want 68/69)", std::string(to_string(v.cls)).c_str(),
                  v.peak_bin.value_or(0))};
}

// 7. Five synthetic fixtures, one per class, at several worker counts.
Outcome classifier_partition() {
  const ClassifierConfig cfg;
  std::vector<spectral::SectorSpectrum> fixtures;
  std::string first_map;
  for (unsigned workers : {1u, 2u, 4u, 8u}) {
    fixtures.clear();
    spectral::AnalysisConfig a;
    a.window = 4096;
    a.roi = {64, 64, 50, 50};

    auto empty = spectral::analyze(Universe(178, 178), a, {workers}).sectors.at(0);
    auto still = spectral::analyze(place(parse_rle("x = 2, y = 2\n2o$2o!"), 64), a, {workers}).sectors.at(0);
    auto law = goldens::power_law_spectrum();
    auto gun = spectral::analyze(place(testsupport::load_pattern("gun30.rle")), a, {workers}).sectors.at(0);

    // Cells with independent fair-coin states each generation.
    std::mt19937_64 rng(7);
    const auto freqs = spectral::FrequencySet::one_sided(4096);
    std::vector<spectral::CellSpectrum> cells;
    for (int c = 0; c < 2500; ++c)
      cells.push_back(spectral::cell_dft(
          spectral::CellSeries::from_bits(0, 0, testsupport::random_series(4096, 0.5, rng)), freqs));
    auto soup = spectral::sector_power(freqs, cells, 2500);

    std::int64_t k = 0;
    for (auto* s : {&empty, &still, &law, &gun, &soup}) {
      s->sector_x = k++;
      s->sector_y = 0;
      fixtures.push_back(*s);
    }
    const auto map = classify_map(fixtures, 5, 1, cfg, workers);
    const SectorClass want[] = {SectorClass::Null, SectorClass::DcOnly, SectorClass::PowerLaw,
                                SectorClass::SharpPeaks, SectorClass::WhiteNoise};
    for (int i = 0; i < 5; ++i)
      if (map.at(i, 0) != want[i])
        return {false, fmt("fixture %d classified %s with %u workers", i, std::string(to_string(map.at(i, 0))).c_str(),
                           workers)};
    const auto csv = class_map_csv(map);
    if (first_map.empty()) first_map = csv;
    else if (csv != first_map) return {false, fmt("class map differs with %u workers", workers)};
  }
  return {true, "empty/still life/power law/gun/soup -> null/dc_only/power_law/sharp_peaks/white_noise, workers 1..8"};
}

// 8. Register machine, encoder, decoder.
Outcome register_machine() {
  const auto program = rm::Program::parse(read_file(testsupport::data_dir() / "add.rm"));
  const std::uint64_t init[] = {1, 1};
  const auto r = rm::run(program, rm::State::with_registers(init), 1000);
  if (!r.final_state.halted || r.final_state.reg(0) != 2 || r.final_state.reg(1) != 0)
    return {false, "Table 2 program did not halt at r0 = 2, r1 = 0"};
  const auto R = rm::encode_urm(program, init);
  const long want[] = {6, 12, 2, 2, 8, 2, 0, 0, 0, 0, 0, 0};
  std::string got;
  for (int i = 0; i < 12; ++i) {
    got += (i ? " " : "") + R[i].get_str();
    if (R[i] != want[i]) return {false, "encoder gave " + got + "..."};
  }
  std::mt19937_64 rng(8);
  const auto halt = rm::Program::parse("HALT\n");
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint64_t> regs(1 + rng() % 12);
    for (auto& v : regs) v = rng() % 64;
    if (rm::prime_exponents(rm::encode_urm(halt, regs)[0], regs.size()) != regs)
      return {false, fmt("decode failed on vector %d", i)};
  }
  return {true, "halts at r0 = 2, r1 = 0; encodes to " + got + "; 100 random vectors decode"};
}

// 9. Throughput of both kernels on 1024^2, one worker.
Outcome performance() {
  std::mt19937_64 rng(9);
  const auto soup = testsupport::random_universe(1024, 1024, 0.35, rng);
  const auto rate = [&](Kernel k, int steps) {
    Engine e(EngineOptions{k, 1});
    Universe a = soup, b;
    e.step_into(a, b);  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < steps; ++i) {
      e.step_into(a, b);
      std::swap(a, b);
    }
    return 1024.0 * 1024.0 * steps / seconds_since(t0);
  };
  const double naive = rate(Kernel::Reference, 4);
  const double fast = rate(Kernel::BitParallel, 200);
  const double ratio = fast / naive;
  return {ratio >= 10 && fast >= 1e8,
          fmt("bit-parallel %.3e cells/s, naive %.3e cells/s, ratio %.1f (need >= 10 and >= 1e8)", fast, naive, ratio)};
}

// 10. Render outputs against committed goldens.
Outcome render_goldens() {
  const auto check = [](const char* name, const std::string& bytes) {
    const auto path = testsupport::golden_dir() / name;
    return std::filesystem::exists(path) && read_file(path) == bytes;
  };
  const auto m = goldens::class_map();
  const auto law = goldens::power_law_spectrum();
  const auto fit = spectral::fit_power_law(law, 1, 100);
  render::PlotOptions linear;
  linear.linear_x = true;
  const std::pair<const char*, std::string> files[] = {
      {"class_map_x1.pgm", render::render_map(m)},
      {"class_map_x4.pgm", render::render_map(m, {}, 4)},
      {"class_map_distinct_dc_x4.pgm", render::render_map(m, render::Palette::distinct_dc(), 4)},
      {"power_law.svg", render::render_spectrum(law, fit)},
      {"power_law_linear.svg", render::render_spectrum(law, fit, linear)},
      {"dc_only.svg", render::render_spectrum(goldens::dc_only_spectrum(), std::nullopt)},
  };
  for (const auto& [name, bytes] : files)
    if (!check(name, bytes)) return {false, std::string(name) + " differs from tests/golden"};
  return {true, "3 PGM and 3 SVG outputs byte-identical to tests/golden"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--expect-fail" || a == "--only") && i + 1 < argc) (a == "--only" ? only : expect_fail).insert(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail ID]... [--only ID]...\n");
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {"1", "engine oracle equivalence", engine_oracle},
      {"2", "engine determinism", engine_determinism},
      {"3", "canonical patterns", canonical_patterns},
      {"4", "DFT oracle and Parseval", dft_oracle},
      {"5", "power-law fit recovery", fit_recovery},
      {"6a", "period-30 gun spectral signature", gun30_signature},
      {"6b", "period-60 gun spectral signature", gun60_signature},
      {"7", "classifier partition", classifier_partition},
      {"8", "register machine and encoder", register_machine},
      {"9", "performance budget", performance},
      {"10", "render golden files", render_goldens},
  };

  std::set<std::string> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(c.id);
    const char* tag = o.pass ? "PASS" : expect_fail.count(c.id) ? "FAIL (documented deviation)" : "FAIL";
    std::printf("[%s] %-3s %s: %s (%.1f s)\n", tag, c.id.c_str(), c.title.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("[SKIP] 11  external URM reproduction: needs the fetched pattern and hours of runtime; see README\n");

  std::set<std::string> expected;
  for (const auto& id : expect_fail)
    if (only.empty() || only.count(id)) expected.insert(id);
  if (failed != expected) {
    for (const auto& id : expected)
      if (!failed.count(id)) std::printf("note: criterion %s was expected to fail but passed\n", id.c_str());
    return 1;
  }
  return 0;
}
