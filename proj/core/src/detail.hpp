// Internal helpers shared by the spectral sources.
#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace lifespec::spectral::detail {

// exp(-2 pi i m / T) for m in [0, T).
class TwiddleTable {
 public:
  explicit TwiddleTable(std::uint64_t window);
  std::uint64_t window() const noexcept { return window_; }
  std::complex<double> operator()(std::uint64_t f, std::uint64_t t) const noexcept {
    return table_[(f % window_) * (t % window_) % window_];
  }

 private:
  std::uint64_t window_;
  std::vector<std::complex<double>> table_;
};

// Accumulates sum_{t in [a,b)} exp(-2 pi i f t / T) for a fixed bin list
// using the geometric-series closed form per run.
class RunAccumulator {
 public:
  RunAccumulator(std::shared_ptr<const TwiddleTable> table, std::span<const std::uint32_t> bins);
  std::size_t size() const noexcept { return bins_.size(); }
  // acc[k] += sum over [begin, end) at bin k.
  void add_run(std::span<std::complex<double>> acc, std::uint64_t begin, std::uint64_t end) const noexcept;

 private:
  std::shared_ptr<const TwiddleTable> table_;
  std::vector<std::uint32_t> bins_;
  std::vector<std::complex<double>> inv_denominator_;  // 1 / (1 - z_f)
};

std::shared_ptr<const TwiddleTable> twiddles(std::uint64_t window);

// Real-to-complex transform of length T using a cached FFTW plan. Each
// instance owns its buffers, so one instance per thread.
class RealFft {
 public:
  explicit RealFft(std::uint64_t window);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::uint64_t window() const noexcept { return window_; }
  double* input() noexcept { return in_; }
  // Unnormalized output for bins 0..T/2.
  std::span<const std::complex<double>> execute();

 private:
  std::uint64_t window_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace lifespec::spectral::detail
