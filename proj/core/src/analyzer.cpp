#include "lifespec/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "detail.hpp"
#include "lifespec/engine.hpp"

namespace lifespec::spectral {
namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw SpectralError(SpectralError::Kind::InvalidConfig, what);
}

// Walks the roi cells whose state differs between previous and current.
template <typename Fn>
void for_each_toggle(const StepView& view, const Roi& roi, Fn&& fn) {
  const std::size_t wpr = view.current.words_per_row();
  const auto cur = view.current.words();
  const auto prev = view.previous.words();
  const std::int64_t x_end = roi.x + roi.width;
  for (const std::size_t idx : view.changed_words) {
    const auto y = static_cast<std::int64_t>(idx / wpr);
    if (y < roi.y || y >= roi.y + roi.height) continue;
    const auto j = static_cast<std::int64_t>(idx % wpr);
    const std::int64_t x0 = j * 64;
    if (x0 + 64 <= roi.x || x0 >= x_end) continue;
    std::uint64_t mask = ~std::uint64_t{0};
    if (roi.x > x0) mask &= ~std::uint64_t{0} << (roi.x - x0);
    if (x_end < x0 + 64) mask &= (std::uint64_t{1} << (x_end - x0)) - 1;
    std::uint64_t diff = (cur[idx] ^ prev[idx]) & mask;
    while (diff) {
      const int b = std::countr_zero(diff);
      fn(x0 + b, y, ((cur[idx] >> b) & 1u) != 0);
      diff &= diff - 1;
    }
  }
}

struct ExactCell {
  CellSeries series;
  std::uint64_t filled = 0;
  bool value = false;
  bool initial = false;
};

struct ProbeCell {
  std::vector<std::complex<double>> acc;
  std::uint64_t run_start = 0;
  bool value = false;
  bool initial = false;
};

std::uint64_t cell_key(std::int64_t x, std::int64_t y, std::int64_t width) {
  return static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(width) + static_cast<std::uint64_t>(x);
}

std::uint64_t live_in_rect(const Universe& u, std::int64_t x0, std::int64_t y0, std::int64_t w, std::int64_t h) {
  std::uint64_t n = 0;
  for (std::int64_t y = y0; y < y0 + h; ++y) {
    auto row = u.row(y);
    for (std::int64_t x = x0; x < x0 + w;) {
      const auto j = static_cast<std::size_t>(x >> 6);
      const std::int64_t base = x & ~std::int64_t{63};
      const std::int64_t stop = std::min(x0 + w, base + 64);
      std::uint64_t mask = ~std::uint64_t{0} << (x - base);
      if (stop - base < 64) mask &= (std::uint64_t{1} << (stop - base)) - 1;
      n += static_cast<std::uint64_t>(std::popcount(row[j] & mask));
      x = stop;
    }
  }
  return n;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  const auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(body);
  body();
  for (auto& t : threads) t.join();
}

struct WindowRun {
  Universe initial;
  std::vector<std::uint64_t> boundary_contacts;
};

// Advances to the window start, then feeds T - 1 steps to `on_step(view, t)`.
template <typename OnStep>
WindowRun run_window(const Universe& universe, const AnalysisConfig& cfg, const AnalyzeOptions& opts,
                     OnStep&& on_step) {
  Engine engine({Kernel::BitParallel, opts.workers});
  WindowRun w;
  const std::uint64_t total = cfg.start_step + cfg.window - 1;
  std::uint64_t done = 0;
  const auto tick = [&] {
    ++done;
    if (opts.progress && (done % 1024 == 0 || done == total)) opts.progress(done, total);
  };
  Universe cur = universe;
  if (cfg.start_step > 0) {
    auto r = engine.run(std::move(cur), cfg.start_step, [&](const StepView&) { tick(); });
    cur = std::move(r.universe);
    w.boundary_contacts = std::move(r.boundary_contacts);
  }
  w.initial = cur;
  const std::uint64_t g0 = cur.generation();
  auto r = engine.run(std::move(cur), cfg.window - 1, [&](const StepView& view) {
    on_step(view, view.generation - g0);
    tick();
  });
  w.boundary_contacts.insert(w.boundary_contacts.end(), r.boundary_contacts.begin(), r.boundary_contacts.end());
  return w;
}

void check_roi(const Universe& u, const Roi& roi) {
  if (roi.x < 0 || roi.y < 0 || roi.x + roi.width > u.width() || roi.y + roi.height > u.height())
    config_error("roi " + std::to_string(roi.x) + "," + std::to_string(roi.y) + "," + std::to_string(roi.width) +
                 "," + std::to_string(roi.height) + " lies outside the " + std::to_string(u.width()) + "x" +
                 std::to_string(u.height()) + " universe");
}

// Sorted cell keys per sector, row-major sector order.
template <typename Map>
std::vector<std::vector<std::uint64_t>> keys_by_sector(const Map& cells, const AnalysisConfig& cfg,
                                                       std::int64_t width) {
  std::vector<std::vector<std::uint64_t>> out(static_cast<std::size_t>(cfg.sectors_x() * cfg.sectors_y()));
  for (const auto& [key, cell] : cells) {
    const auto x = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(width));
    const auto y = static_cast<std::int64_t>(key / static_cast<std::uint64_t>(width));
    const auto sx = (x - cfg.roi.x) / cfg.sector_size;
    const auto sy = (y - cfg.roi.y) / cfg.sector_size;
    out[static_cast<std::size_t>(sy * cfg.sectors_x() + sx)].push_back(key);
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

void finish_sector(SectorSpectrum& s, const AnalysisConfig& cfg) {
  const double inv_n = 1.0 / static_cast<double>(s.n_cells);
  for (auto& p : s.power) p *= inv_n;
  apply_roundoff_floor(s);
  try {
    s.fit = fit_power_law(s, 1, cfg.fit_upper);
  } catch (const SpectralError& e) {
    if (e.kind() != SpectralError::Kind::InsufficientSupport) throw;
  }
}

}  // namespace

std::string to_string(AnalysisMode mode) { return mode == AnalysisMode::Exact ? "exact" : "probe"; }

void AnalysisConfig::validate() const {
  if (window < 2) config_error("window T must be at least 2");
  if (window > (std::uint64_t{1} << 31)) config_error("window T is too large");
  if (mode == AnalysisMode::Exact && !std::has_single_bit(window))
    config_error("exact mode needs a power-of-two window, got T = " + std::to_string(window));
  if (fit_upper < 1 || fit_upper >= window / 2)
    config_error("fit upper frequency must satisfy 1 <= f_u < T/2 (f_u = " + std::to_string(fit_upper) +
                 ", T = " + std::to_string(window) + ")");
  if (sector_size < 1) config_error("sector size must be positive");
  if (roi.width <= 0 || roi.height <= 0 || roi.width % sector_size || roi.height % sector_size)
    config_error("roi dimensions must be positive multiples of the sector size");
  if (!std::isfinite(beta_max) || !std::isfinite(sigma2_max) || !(peak_ratio > 0) || !std::isfinite(peak_ratio))
    config_error("thresholds must be finite and peak ratio positive");
}

FrequencySetPtr AnalysisConfig::frequency_set() const {
  if (mode == AnalysisMode::Exact) return FrequencySet::one_sided(window);
  return FrequencySet::probe(window, fit_upper, probe_periods);
}

std::uint64_t AnalysisConfig::bytes_per_changed_cell() const {
  if (mode == AnalysisMode::Exact) return (window + 63) / 64 * 8;
  return frequency_set()->size() * sizeof(std::complex<double>);
}

MemoryBudgetExceeded::MemoryBudgetExceeded(std::uint64_t changed_cells, std::uint64_t bytes_per_cell,
                                           std::uint64_t limit)
    : SpectralError(Kind::MemoryBudgetExceeded,
                    "memory budget of " + std::to_string(limit) + " bytes exceeded: at least " +
                        std::to_string(changed_cells) + " changed cells at " + std::to_string(bytes_per_cell) +
                        " bytes each"),
      changed_cells_(changed_cells),
      bytes_per_cell_(bytes_per_cell) {}

std::uint64_t count_changed_cells(const Universe& universe, const AnalysisConfig& cfg, const AnalyzeOptions& opts) {
  cfg.validate();
  check_roi(universe, cfg.roi);
  Universe changed(universe.width(), universe.height());
  run_window(universe, cfg, opts, [&](const StepView& view, std::uint64_t) {
    for_each_toggle(view, cfg.roi, [&](std::int64_t x, std::int64_t y, bool) { changed.set(x, y, true); });
  });
  return changed.population();
}

AnalysisResult analyze(const Universe& universe, const AnalysisConfig& cfg, const AnalyzeOptions& opts) {
  cfg.validate();
  check_roi(universe, cfg.roi);
  const auto T = cfg.window;
  const auto freqs = cfg.frequency_set();
  const auto per_cell = cfg.bytes_per_changed_cell();
  const std::int64_t width = universe.width();
  const auto budget_check = [&](std::size_t cells) {
    if ((cells + 1) * per_cell > opts.memory_limit) throw MemoryBudgetExceeded(cells + 1, per_cell, opts.memory_limit);
  };

  AnalysisResult result;
  result.sectors_x = cfg.sectors_x();
  result.sectors_y = cfg.sectors_y();
  result.freqs = freqs;
  const auto n_sectors = static_cast<std::size_t>(result.sectors_x * result.sectors_y);
  result.sectors.resize(n_sectors);
  for (std::size_t i = 0; i < n_sectors; ++i) {
    auto& s = result.sectors[i];
    s.sector_x = static_cast<std::int64_t>(i) % result.sectors_x;
    s.sector_y = static_cast<std::int64_t>(i) / result.sectors_x;
    s.freqs = freqs;
    s.n_cells = cfg.cells_per_sector();
  }

  // Alive-at-window-start cells per sector; changed cells are subtracted later.
  const auto constant_live = [&](const Universe& initial, const SectorSpectrum& s, std::uint64_t changed_alive) {
    return live_in_rect(initial, cfg.roi.x + s.sector_x * cfg.sector_size, cfg.roi.y + s.sector_y * cfg.sector_size,
                        cfg.sector_size, cfg.sector_size) -
           changed_alive;
  };

  if (cfg.mode == AnalysisMode::Exact) {
    std::unordered_map<std::uint64_t, ExactCell> cells;
    auto window = run_window(universe, cfg, opts, [&](const StepView& view, std::uint64_t t) {
      for_each_toggle(view, cfg.roi, [&](std::int64_t x, std::int64_t y, bool now) {
        const auto key = cell_key(x, y, width);
        auto it = cells.find(key);
        if (it == cells.end()) {
          budget_check(cells.size());
          ExactCell c{CellSeries(x, y, T), 0, !now, !now};
          it = cells.emplace(key, std::move(c)).first;
        }
        auto& c = it->second;
        c.series.fill(c.filled, t, c.value);
        c.filled = t;
        c.value = now;
      });
    });
    for (auto& [key, c] : cells) c.series.fill(c.filled, T, c.value);
    result.changed_cells = cells.size();
    result.boundary_contacts = std::move(window.boundary_contacts);

    const auto by_sector = keys_by_sector(cells, cfg, width);
    parallel_for(n_sectors, std::max(1u, opts.workers), [&](std::size_t i) {
      thread_local std::unique_ptr<detail::RealFft> fft;
      if (!fft || fft->window() != T) fft = std::make_unique<detail::RealFft>(T);
      auto& s = result.sectors[i];
      std::vector<double> acc(freqs->size(), 0.0);
      std::uint64_t changed_alive = 0;
      for (auto key : by_sector[i]) changed_alive += cells.at(key).initial ? 1 : 0;
      acc[0] = static_cast<double>(constant_live(window.initial, s, changed_alive));
      const double scale = 1.0 / static_cast<double>(T);
      for (auto key : by_sector[i]) {
        const auto& series = cells.at(key).series;
        double* in = fft->input();
        for (std::uint64_t t = 0; t < T; ++t) in[t] = series.get(t) ? 1.0 : 0.0;
        const auto out = fft->execute();
        for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += std::norm(out[f] * scale);
      }
      s.power = std::move(acc);
      finish_sector(s, cfg);
    });
    return result;
  }

  // Probe mode: per changed cell, one complex accumulator per probed bin.
  const detail::RunAccumulator runs(detail::twiddles(T), freqs->bins());
  std::unordered_map<std::uint64_t, ProbeCell> cells;
  auto window = run_window(universe, cfg, opts, [&](const StepView& view, std::uint64_t t) {
    for_each_toggle(view, cfg.roi, [&](std::int64_t x, std::int64_t y, bool now) {
      const auto key = cell_key(x, y, width);
      auto it = cells.find(key);
      if (it == cells.end()) {
        budget_check(cells.size());
        ProbeCell c{std::vector<std::complex<double>>(freqs->size()), 0, !now, !now};
        it = cells.emplace(key, std::move(c)).first;
      }
      auto& c = it->second;
      if (c.value) runs.add_run(c.acc, c.run_start, t);
      c.value = now;
      c.run_start = t;
    });
  });
  for (auto& [key, c] : cells)
    if (c.value) runs.add_run(c.acc, c.run_start, T);
  result.changed_cells = cells.size();
  result.boundary_contacts = std::move(window.boundary_contacts);

  const auto by_sector = keys_by_sector(cells, cfg, width);
  const auto dc = freqs->index_of(0);
  parallel_for(n_sectors, std::max(1u, opts.workers), [&](std::size_t i) {
    auto& s = result.sectors[i];
    std::vector<double> acc(freqs->size(), 0.0);
    std::uint64_t changed_alive = 0;
    for (auto key : by_sector[i]) changed_alive += cells.at(key).initial ? 1 : 0;
    if (dc) acc[*dc] = static_cast<double>(constant_live(window.initial, s, changed_alive));
    const double scale = 1.0 / static_cast<double>(T);
    for (auto key : by_sector[i]) {
      const auto& c = cells.at(key);
      for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += std::norm(c.acc[f] * scale);
    }
    s.power = std::move(acc);
    finish_sector(s, cfg);
  });
  return result;
}

}  // namespace lifespec::spectral
