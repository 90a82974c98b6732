// Per-cell DFTs, per-sector power spectra, and log-log power-law fits.
//
// Conventions follow the usual CA power-spectrum analysis:
//   s_hat(f) = (1/T) * sum_t s(t) * exp(-2 pi i t f / T)
//   S(f)     = (1/N) * sum_cells |s_hat(f)|^2
//   ln S(f) ~ alpha + beta * ln f, fitted over 1 <= f <= f_u
// and sigma^2 is the mean squared residual of that fit over the bins used.
#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lifespec::spectral {

class SpectralError : public std::runtime_error {
 public:
  enum class Kind { InvalidConfig, MismatchedFrequencySets, InsufficientSupport, EmptyInput, MemoryBudgetExceeded };
  SpectralError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Ordered set of integer frequency bins for a window of length T.
class FrequencySet {
 public:
  // Every bin 0..T/2 (one-sided spectrum of a real series).
  static std::shared_ptr<const FrequencySet> one_sided(std::uint64_t window);
  // Bins 0..fit_upper plus round(k*T/p) for each period p and k = 1..T/(2p).
  static std::shared_ptr<const FrequencySet> probe(std::uint64_t window, std::uint32_t fit_upper,
                                                   std::span<const std::uint32_t> periods);
  static std::shared_ptr<const FrequencySet> from_bins(std::uint64_t window, std::vector<std::uint32_t> bins);

  std::uint64_t window() const noexcept { return window_; }
  bool is_one_sided() const noexcept { return one_sided_; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::uint32_t operator[](std::size_t i) const noexcept { return bins_[i]; }
  std::span<const std::uint32_t> bins() const noexcept { return bins_; }
  std::optional<std::size_t> index_of(std::uint32_t f) const noexcept;

  friend bool operator==(const FrequencySet& a, const FrequencySet& b) noexcept {
    return a.window_ == b.window_ && a.bins_ == b.bins_;
  }

 private:
  std::uint64_t window_ = 0;
  bool one_sided_ = false;
  std::vector<std::uint32_t> bins_;  // strictly increasing
};

using FrequencySetPtr = std::shared_ptr<const FrequencySet>;

// Packed T-sample binary series of one cell.
class CellSeries {
 public:
  CellSeries() = default;
  CellSeries(std::int64_t x, std::int64_t y, std::uint64_t length);
  static CellSeries from_bits(std::int64_t x, std::int64_t y, std::span<const std::uint8_t> samples);

  std::int64_t x() const noexcept { return x_; }
  std::int64_t y() const noexcept { return y_; }
  std::uint64_t length() const noexcept { return length_; }
  bool get(std::uint64_t t) const noexcept { return (bits_[t >> 6] >> (t & 63)) & 1u; }
  void set(std::uint64_t t, bool v) noexcept;
  // Sets samples [begin, end) to v.
  void fill(std::uint64_t begin, std::uint64_t end, bool v) noexcept;
  std::uint64_t count_ones() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return bits_; }

 private:
  std::int64_t x_ = 0, y_ = 0;
  std::uint64_t length_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct CellSpectrum {
  FrequencySetPtr freqs;
  std::vector<std::complex<double>> amplitudes;  // one per bin of freqs
};

// One-sided sets go through a real FFT; explicit bin lists are evaluated per
// bin from the series' runs of ones.
CellSpectrum cell_dft(const CellSeries& series, const FrequencySetPtr& freqs);

struct PowerLawFit {
  double alpha = 0;
  double beta = 0;
  double sigma2 = 0;
  std::size_t fitted_bins = 0;
};

// Power values are stored with trailing zeros trimmed: a null spectrum has an
// empty vector and a DC-only spectrum a single entry.
struct SectorSpectrum {
  std::int64_t sector_x = 0;
  std::int64_t sector_y = 0;
  FrequencySetPtr freqs;
  std::vector<double> power;
  std::uint64_t n_cells = 0;
  std::optional<PowerLawFit> fit;

  std::size_t size() const noexcept { return freqs ? freqs->size() : 0; }
  double at(std::size_t i) const noexcept { return i < power.size() ? power[i] : 0.0; }
  std::uint32_t frequency(std::size_t i) const noexcept { return (*freqs)[i]; }
  bool all_zero() const noexcept { return power.empty(); }
  // Period of component i in generations (T / f); infinite at DC.
  double period(std::size_t i) const noexcept;
  void trim() noexcept;
};

// S(f) = (1/n_cells) * (constant_live_cells * [f == 0] + sum |s_hat(f)|^2).
// Cells that never changed are passed only through constant_live_cells (the
// number of them that stayed alive) and n_cells.
// Every spectrum must use `freqs`.
SectorSpectrum sector_power(const FrequencySetPtr& freqs, std::span<const CellSpectrum> spectra,
                            std::uint64_t n_cells, std::uint64_t constant_live_cells = 0);

// Bins of a computed spectrum below kRoundoffFloor * S(0) are transform
// roundoff and are stored as exact zeros.
inline constexpr double kRoundoffFloor = 1e-20;
void apply_roundoff_floor(SectorSpectrum& s) noexcept;

// Ordinary least squares of ln S on ln f over bins f_lo <= f <= f_hi with
// S(f) > 0. sigma2 is filled in via residual().
PowerLawFit fit_power_law(const SectorSpectrum& s, std::uint32_t f_lo, std::uint32_t f_hi);
PowerLawFit fit_power_law(std::span<const double> freqs, std::span<const double> power);

double residual(const SectorSpectrum& s, const PowerLawFit& fit, std::uint32_t f_lo, std::uint32_t f_hi);
double residual(std::span<const double> freqs, std::span<const double> power, const PowerLawFit& fit);

SectorSpectrum average_spectrum(std::span<const SectorSpectrum> spectra);

// CSV with header "f,S", 9 significant digits.
std::string spectrum_csv(const SectorSpectrum& s);
// Parses spectrum_csv() output back; the window is taken as 2 * max bin.
SectorSpectrum parse_spectrum_csv(std::string_view text, std::uint64_t window = 0);

std::string format_g9(double v);

}  // namespace lifespec::spectral
