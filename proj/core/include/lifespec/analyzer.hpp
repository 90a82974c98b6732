// Windowed sector analysis of a running universe.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lifespec/spectral.hpp"
#include "lifespec/universe.hpp"

namespace lifespec::spectral {

enum class AnalysisMode { Exact, Probe };

struct Roi {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
  friend bool operator==(const Roi&, const Roi&) = default;
};

struct AnalysisConfig {
  std::uint64_t window = 65536;      // T, samples per cell
  std::uint32_t fit_upper = 100;     // f_u
  std::int64_t sector_size = 50;
  Roi roi;                           // universe coordinates
  std::uint64_t start_step = 0;      // generations discarded before the window
  double beta_max = -0.2;
  double sigma2_max = 1.5;
  double peak_ratio = 50.0;
  std::vector<std::uint32_t> probe_periods{30, 60};
  AnalysisMode mode = AnalysisMode::Exact;
  // Classifier clause order: false tests power law before sharp peaks.
  bool peaks_first = false;

  // Throws SpectralError{InvalidConfig}.
  void validate() const;
  FrequencySetPtr frequency_set() const;
  std::int64_t sectors_x() const noexcept { return roi.width / sector_size; }
  std::int64_t sectors_y() const noexcept { return roi.height / sector_size; }
  std::uint64_t cells_per_sector() const noexcept {
    return static_cast<std::uint64_t>(sector_size) * static_cast<std::uint64_t>(sector_size);
  }
  // Bytes held per changed cell while the window is recorded.
  std::uint64_t bytes_per_changed_cell() const;
};

class MemoryBudgetExceeded : public SpectralError {
 public:
  MemoryBudgetExceeded(std::uint64_t changed_cells, std::uint64_t bytes_per_cell, std::uint64_t limit);
  std::uint64_t changed_cells() const noexcept { return changed_cells_; }
  std::uint64_t bytes_per_cell() const noexcept { return bytes_per_cell_; }

 private:
  std::uint64_t changed_cells_;
  std::uint64_t bytes_per_cell_;
};

struct AnalyzeOptions {
  unsigned workers = 1;
  std::uint64_t memory_limit = std::uint64_t{16} << 30;
  // Called every 1,024 generations with (done, total).
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

struct AnalysisResult {
  std::int64_t sectors_x = 0;
  std::int64_t sectors_y = 0;
  FrequencySetPtr freqs;
  std::vector<SectorSpectrum> sectors;  // row-major over the sector grid
  std::uint64_t changed_cells = 0;
  std::vector<std::uint64_t> boundary_contacts;

  const SectorSpectrum& sector(std::int64_t sx, std::int64_t sy) const {
    return sectors.at(static_cast<std::size_t>(sy * sectors_x + sx));
  }
};

// Runs start_step discarded generations, records T samples of every roi cell
// (T - 1 further steps), and returns one spectrum per sector, each with a
// power-law fit over [1, f_u] when at least two bins there are positive.
AnalysisResult analyze(const Universe& universe, const AnalysisConfig& config, const AnalyzeOptions& options = {});

// Dry run of the same window without storing series: the number of roi cells
// whose state changes at least once.
std::uint64_t count_changed_cells(const Universe& universe, const AnalysisConfig& config,
                                  const AnalyzeOptions& options = {});

std::string to_string(AnalysisMode mode);

}  // namespace lifespec::spectral
