#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lifespec/analyzer.hpp"
#include "lifespec/engine.hpp"
#include "lifespec/pattern.hpp"
#include "support.hpp"

using namespace lifespec;
using namespace lifespec::spectral;

namespace {

AnalysisConfig small_config(std::uint64_t T, Roi roi, std::int64_t sector = 50) {
  AnalysisConfig c;
  c.window = T;
  c.fit_upper = static_cast<std::uint32_t>(std::min<std::uint64_t>(100, T / 2 - 1));
  c.sector_size = sector;
  c.roi = roi;
  return c;
}

void check_same(const SectorSpectrum& a, const SectorSpectrum& b, double rel) {
  REQUIRE(a.size() == b.size());
  CHECK(a.n_cells == b.n_cells);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(a.at(i) - b.at(i)) <= rel * std::max(std::abs(b.at(i)), 1e-300));
  }
}

}  // namespace

TEST_CASE("config validation") {
  auto c = small_config(64, {0, 0, 50, 50});
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.window = 100;
  CHECK_THROWS_AS(bad.validate(), SpectralError);  // exact mode needs a power of two
  bad.mode = AnalysisMode::Probe;
  CHECK_NOTHROW(bad.validate());
  bad = c;
  bad.fit_upper = 32;
  CHECK_THROWS_AS(bad.validate(), SpectralError);
  bad = c;
  bad.roi.width = 60;
  CHECK_THROWS_AS(bad.validate(), SpectralError);
  bad = c;
  bad.beta_max = std::nan("");
  CHECK_THROWS_AS(bad.validate(), SpectralError);
}

TEST_CASE("empty universe gives null spectra everywhere") {
  const Universe u(100, 100);
  const auto r = analyze(u, small_config(16, {0, 0, 100, 100}));
  CHECK(r.sectors_x == 2);
  CHECK(r.sectors_y == 2);
  CHECK(r.changed_cells == 0);
  for (const auto& s : r.sectors) {
    CHECK(s.all_zero());
    CHECK(!s.fit);
  }
}

TEST_CASE("blinker sector, T = 8") {
  const auto u = place(testsupport::load_pattern("blinker.rle"), 25);
  const auto r = analyze(u, small_config(8, {0, 0, 50, 50}));
  REQUIRE(r.sectors.size() == 1);
  const auto& s = r.sector(0, 0);
  CHECK(r.changed_cells == 4);
  // Four cells alternate starting from either phase, the centre stays on.
  CHECK(s.at(0) == doctest::Approx((4 * 0.25 + 1.0) / 2500).epsilon(1e-12));
  CHECK(s.at(4) == doctest::Approx(4 * 0.25 / 2500).epsilon(1e-12));
  for (int f : {1, 2, 3}) CHECK(s.at(f) == 0);
}

TEST_CASE("sector spectra match a brute-force simulation and direct DFT") {
  const auto u = place(testsupport::load_pattern("gun30.rle"), 64);
  const std::uint64_t T = 4096;
  const Roi roi{64, 64, 50, 50};
  const auto r = analyze(u, small_config(T, roi), {4});
  const auto& s = r.sector(0, 0);

  // Reference kernel, full per-cell series, direct sums at selected bins.
  std::vector<std::vector<std::uint8_t>> cells(2500, std::vector<std::uint8_t>(T));
  Universe cur = u;
  for (std::uint64_t t = 0; t < T; ++t) {
    for (std::int64_t y = 0; y < 50; ++y)
      for (std::int64_t x = 0; x < 50; ++x) cells[y * 50 + x][t] = cur.get(roi.x + x, roi.y + y);
    if (t + 1 < T) cur = reference_step(cur);
  }
  for (std::uint32_t f : {0u, 1u, 68u, 136u, 137u, 273u, 410u, 1000u, 2048u}) {
    double power = 0;
    for (const auto& c : cells) power += std::norm(testsupport::direct_dft(c, f));
    power /= 2500;
    CAPTURE(f);
    const double got = s.at(*s.freqs->index_of(f));
    CHECK(std::abs(got - power) <= 1e-9 * std::max(power, s.at(0)));
  }

  // The whole gun in one sector: every strong line is a harmonic of T/30.
  std::vector<std::pair<double, std::uint32_t>> ranked;
  for (std::size_t i = 1; i < s.size(); ++i) ranked.emplace_back(s.at(i), s.frequency(i));
  std::sort(ranked.rbegin(), ranked.rend());
  for (int k = 0; k < 6; ++k) {
    const double harmonic = ranked[k].second * 30.0 / T;
    CHECK(std::abs(harmonic - std::round(harmonic)) * T / 30.0 <= 1.0);
  }
}

TEST_CASE("probe mode agrees with exact mode at probed bins") {
  const auto u = place(testsupport::load_pattern("gun60.rle"), 64);
  auto exact_cfg = small_config(2048, {64, 64, 100, 100});
  auto probe_cfg = exact_cfg;
  probe_cfg.mode = AnalysisMode::Probe;
  const auto exact = analyze(u, exact_cfg, {2});
  const auto probe = analyze(u, probe_cfg, {2});
  REQUIRE(exact.sectors.size() == probe.sectors.size());
  for (std::size_t k = 0; k < exact.sectors.size(); ++k) {
    const auto& e = exact.sectors[k];
    const auto& p = probe.sectors[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double ev = e.at(*e.freqs->index_of(p.frequency(i)));
      CAPTURE(p.frequency(i));
      CHECK(std::abs(p.at(i) - ev) <= 1e-9 * std::max(ev, e.at(0)));
    }
  }
}

TEST_CASE("frame invariance: a roi equals its sector-aligned parts") {
  std::mt19937_64 rng(8);
  Universe u = testsupport::random_universe(160, 120, 0.35, rng);
  const auto whole = analyze(u, small_config(256, {10, 10, 120, 80}, 40), {3});
  for (std::int64_t sy = 0; sy < 2; ++sy) {
    for (std::int64_t sx = 0; sx < 3; ++sx) {
      const auto part = analyze(u, small_config(256, {10 + 40 * sx, 10 + 40 * sy, 40, 40}, 40));
      check_same(part.sector(0, 0), whole.sector(sx, sy), 1e-12);
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(9);
  const auto u = testsupport::random_universe(200, 150, 0.3, rng);
  const auto cfg = small_config(512, {0, 0, 200, 150});
  const auto ref = analyze(u, cfg, {1});
  for (unsigned w : {2u, 4u, 8u}) {
    const auto r = analyze(u, cfg, {w});
    REQUIRE(r.sectors.size() == ref.sectors.size());
    for (std::size_t k = 0; k < r.sectors.size(); ++k) CHECK(r.sectors[k].power == ref.sectors[k].power);
  }
}

TEST_CASE("start_step discards generations before the window") {
  const auto u = place(testsupport::load_pattern("blinker.rle"), 25);
  auto cfg = small_config(8, {0, 0, 50, 50});
  cfg.start_step = 1;
  const auto shifted = analyze(u, cfg);
  const auto base = analyze(u, small_config(8, {0, 0, 50, 50}));
  // One generation of shift changes the phase only, not the power.
  check_same(shifted.sector(0, 0), base.sector(0, 0), 1e-12);
}

TEST_CASE("memory budget") {
  std::mt19937_64 rng(10);
  const auto u = testsupport::random_universe(100, 100, 0.4, rng);
  auto cfg = small_config(1024, {0, 0, 100, 100});
  const auto changed = count_changed_cells(u, cfg);
  CHECK(changed > 100);
  AnalyzeOptions opts;
  opts.memory_limit = changed * cfg.bytes_per_changed_cell() - 1;
  try {
    analyze(u, cfg, opts);
    FAIL("budget not enforced");
  } catch (const MemoryBudgetExceeded& e) {
    CHECK(e.changed_cells() >= 1);
    CHECK(e.kind() == SpectralError::Kind::MemoryBudgetExceeded);
  }
  opts.memory_limit = changed * cfg.bytes_per_changed_cell();
  CHECK(analyze(u, cfg, opts).changed_cells == changed);
}

TEST_CASE("boundary contact is reported, not fatal") {
  Universe u(40, 40);
  for (auto c : testsupport::load_pattern("glider.rle").live_cells) u.set(c.x + 30, c.y + 30, true);
  const auto r = analyze(u, small_config(64, {0, 0, 40, 40}, 40));
  CHECK(!r.boundary_contacts.empty());
}
