#include "lifespec/spectral.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "detail.hpp"

namespace lifespec::spectral {
namespace detail {
namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

TwiddleTable::TwiddleTable(std::uint64_t window) : window_(window), table_(window) {
  for (std::uint64_t m = 0; m < window; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(window);
    table_[m] = {std::cos(angle), -std::sin(angle)};
  }
}

std::shared_ptr<const TwiddleTable> twiddles(std::uint64_t window) {
  static std::mutex m;
  static std::map<std::uint64_t, std::weak_ptr<const TwiddleTable>> cache;
  std::lock_guard lk(m);
  auto& slot = cache[window];
  if (auto t = slot.lock()) return t;
  auto t = std::make_shared<const TwiddleTable>(window);
  slot = t;
  return t;
}

RunAccumulator::RunAccumulator(std::shared_ptr<const TwiddleTable> table, std::span<const std::uint32_t> bins)
    : table_(std::move(table)), bins_(bins.begin(), bins.end()) {
  inv_denominator_.reserve(bins_.size());
  for (auto f : bins_) {
    const bool dc = f % table_->window() == 0;
    inv_denominator_.push_back(dc ? std::complex<double>{} : 1.0 / (1.0 - (*table_)(f, 1)));
  }
}

void RunAccumulator::add_run(std::span<std::complex<double>> acc, std::uint64_t begin,
                             std::uint64_t end) const noexcept {
  if (end <= begin) return;
  const auto& tw = *table_;
  for (std::size_t k = 0; k < bins_.size(); ++k) {
    const auto f = bins_[k];
    if (f % tw.window() == 0) {
      acc[k] += static_cast<double>(end - begin);
    } else {
      acc[k] += (tw(f, begin) - tw(f, end)) * inv_denominator_[k];
    }
  }
}

RealFft::RealFft(std::uint64_t window) : window_(window) {
  in_ = fftw_alloc_real(window);
  out_ = fftw_alloc_complex(window / 2 + 1);
  std::lock_guard lk(fftw_planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(window), in_, out_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lk(fftw_planner_mutex());
  fftw_destroy_plan(plan_);
  fftw_free(in_);
  fftw_free(out_);
}

std::span<const std::complex<double>> RealFft::execute() {
  fftw_execute(plan_);
  return {reinterpret_cast<const std::complex<double>*>(out_), window_ / 2 + 1};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FrequencySet

std::shared_ptr<const FrequencySet> FrequencySet::one_sided(std::uint64_t window) {
  auto s = std::make_shared<FrequencySet>();
  s->window_ = window;
  s->one_sided_ = true;
  s->bins_.resize(window / 2 + 1);
  for (std::size_t i = 0; i < s->bins_.size(); ++i) s->bins_[i] = static_cast<std::uint32_t>(i);
  return s;
}

std::shared_ptr<const FrequencySet> FrequencySet::probe(std::uint64_t window, std::uint32_t fit_upper,
                                                        std::span<const std::uint32_t> periods) {
  std::vector<std::uint32_t> bins;
  for (std::uint32_t f = 0; f <= fit_upper && f <= window / 2; ++f) bins.push_back(f);
  for (auto p : periods) {
    if (p == 0) continue;
    for (std::uint64_t k = 1; k <= window / (2 * std::uint64_t{p}); ++k) {
      const auto f = static_cast<std::uint32_t>(std::llround(static_cast<double>(k * window) / p));
      if (f <= window / 2) bins.push_back(f);
    }
  }
  return from_bins(window, std::move(bins));
}

std::shared_ptr<const FrequencySet> FrequencySet::from_bins(std::uint64_t window, std::vector<std::uint32_t> bins) {
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  auto s = std::make_shared<FrequencySet>();
  s->window_ = window;
  s->one_sided_ = bins.size() == window / 2 + 1 && !bins.empty() && bins.back() == window / 2;
  s->bins_ = std::move(bins);
  return s;
}

std::optional<std::size_t> FrequencySet::index_of(std::uint32_t f) const noexcept {
  auto it = std::lower_bound(bins_.begin(), bins_.end(), f);
  if (it == bins_.end() || *it != f) return std::nullopt;
  return static_cast<std::size_t>(it - bins_.begin());
}

// ---------------------------------------------------------------------------
// CellSeries

CellSeries::CellSeries(std::int64_t x, std::int64_t y, std::uint64_t length)
    : x_(x), y_(y), length_(length), bits_((length + 63) / 64, 0) {}

CellSeries CellSeries::from_bits(std::int64_t x, std::int64_t y, std::span<const std::uint8_t> samples) {
  CellSeries s(x, y, samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) s.set(t, samples[t] != 0);
  return s;
}

void CellSeries::set(std::uint64_t t, bool v) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (t & 63);
  bits_[t >> 6] = v ? (bits_[t >> 6] | bit) : (bits_[t >> 6] & ~bit);
}

void CellSeries::fill(std::uint64_t begin, std::uint64_t end, bool v) noexcept {
  while (begin < end && (begin & 63)) set(begin++, v);
  const std::uint64_t word = v ? ~std::uint64_t{0} : 0;
  for (; begin + 64 <= end; begin += 64) bits_[begin >> 6] = word;
  while (begin < end) set(begin++, v);
}

std::uint64_t CellSeries::count_ones() const noexcept {
  std::uint64_t n = 0;
  for (auto w : bits_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

// ---------------------------------------------------------------------------
// DFT

CellSpectrum cell_dft(const CellSeries& series, const FrequencySetPtr& freqs) {
  if (!freqs || freqs->window() != series.length())
    throw SpectralError(SpectralError::Kind::MismatchedFrequencySets, "frequency set window differs from series length");
  const auto T = series.length();
  CellSpectrum out{freqs, std::vector<std::complex<double>>(freqs->size())};
  const double scale = 1.0 / static_cast<double>(T);

  if (freqs->is_one_sided()) {
    detail::RealFft fft(T);
    double* in = fft.input();
    for (std::uint64_t t = 0; t < T; ++t) in[t] = series.get(t) ? 1.0 : 0.0;
    auto spec = fft.execute();
    for (std::size_t i = 0; i < out.amplitudes.size(); ++i) out.amplitudes[i] = spec[i] * scale;
    return out;
  }

  detail::RunAccumulator acc(detail::twiddles(T), freqs->bins());
  std::uint64_t t = 0;
  while (t < T) {
    while (t < T && !series.get(t)) ++t;
    const auto begin = t;
    while (t < T && series.get(t)) ++t;
    acc.add_run(out.amplitudes, begin, t);
  }
  for (auto& a : out.amplitudes) a *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// Sector power

double SectorSpectrum::period(std::size_t i) const noexcept {
  const auto f = frequency(i);
  if (f == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(freqs->window()) / f;
}

void SectorSpectrum::trim() noexcept {
  while (!power.empty() && power.back() == 0.0) power.pop_back();
}

SectorSpectrum sector_power(const FrequencySetPtr& freqs, std::span<const CellSpectrum> spectra,
                            std::uint64_t n_cells, std::uint64_t constant_live_cells) {
  if (n_cells == 0) throw SpectralError(SpectralError::Kind::EmptyInput, "sector has no cells");
  if (!freqs) throw SpectralError(SpectralError::Kind::EmptyInput, "sector_power needs a frequency set");
  for (const auto& s : spectra)
    if (!s.freqs || !(*s.freqs == *freqs) || s.amplitudes.size() != freqs->size())
      throw SpectralError(SpectralError::Kind::MismatchedFrequencySets, "cell spectra use different frequency sets");

  SectorSpectrum out;
  out.freqs = freqs;
  out.n_cells = n_cells;
  out.power.assign(freqs->size(), 0.0);
  if (constant_live_cells) {
    if (auto dc = freqs->index_of(0)) out.power[*dc] += static_cast<double>(constant_live_cells);
  }
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i) out.power[i] += std::norm(s.amplitudes[i]);
  const double inv_n = 1.0 / static_cast<double>(n_cells);
  for (auto& p : out.power) p *= inv_n;
  apply_roundoff_floor(out);
  return out;
}

void apply_roundoff_floor(SectorSpectrum& s) noexcept {
  // For a non-negative series |s_hat(f)| <= s_hat(0), so S(0) bounds every bin.
  const auto dc = s.freqs ? s.freqs->index_of(0) : std::nullopt;
  if (dc && *dc < s.power.size()) {
    const double floor = kRoundoffFloor * s.power[*dc];
    for (std::size_t i = 0; i < s.power.size(); ++i)
      if (i != *dc && s.power[i] < floor) s.power[i] = 0.0;
  }
  s.trim();
}

// ---------------------------------------------------------------------------
// Power-law fit

namespace {

struct LogPoints {
  std::vector<double> x, y;
};

LogPoints log_points(const SectorSpectrum& s, std::uint32_t f_lo, std::uint32_t f_hi) {
  LogPoints pts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto f = s.frequency(i);
    if (f < f_lo || f > f_hi || f == 0) continue;
    const double p = s.at(i);
    if (p > 0) {
      pts.x.push_back(std::log(static_cast<double>(f)));
      pts.y.push_back(std::log(p));
    }
  }
  return pts;
}

LogPoints log_points(std::span<const double> freqs, std::span<const double> power) {
  if (freqs.size() != power.size())
    throw SpectralError(SpectralError::Kind::MismatchedFrequencySets, "frequency and power lengths differ");
  LogPoints pts;
  for (std::size_t i = 0; i < freqs.size(); ++i)
    if (freqs[i] > 0 && power[i] > 0) {
      pts.x.push_back(std::log(freqs[i]));
      pts.y.push_back(std::log(power[i]));
    }
  return pts;
}

double mean_square_residual(const LogPoints& pts, double alpha, double beta) {
  double acc = 0;
  for (std::size_t i = 0; i < pts.x.size(); ++i) {
    const double r = pts.y[i] - alpha - beta * pts.x[i];
    acc += r * r;
  }
  return pts.x.empty() ? 0.0 : acc / static_cast<double>(pts.x.size());
}

PowerLawFit ols(const LogPoints& pts) {
  const std::size_t n = pts.x.size();
  if (n < 2)
    throw SpectralError(SpectralError::Kind::InsufficientSupport,
                        "power-law fit needs at least 2 positive bins, got " + std::to_string(n));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += pts.x[i];
    my += pts.y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (pts.x[i] - mx) * (pts.x[i] - mx);
    sxy += (pts.x[i] - mx) * (pts.y[i] - my);
  }
  if (sxx == 0)
    throw SpectralError(SpectralError::Kind::InsufficientSupport, "power-law fit needs at least 2 distinct frequencies");
  PowerLawFit fit;
  fit.beta = sxy / sxx;
  fit.alpha = my - fit.beta * mx;
  fit.fitted_bins = n;
  fit.sigma2 = mean_square_residual(pts, fit.alpha, fit.beta);
  return fit;
}

}  // namespace

PowerLawFit fit_power_law(const SectorSpectrum& s, std::uint32_t f_lo, std::uint32_t f_hi) {
  return ols(log_points(s, f_lo, f_hi));
}

PowerLawFit fit_power_law(std::span<const double> freqs, std::span<const double> power) {
  return ols(log_points(freqs, power));
}

double residual(const SectorSpectrum& s, const PowerLawFit& fit, std::uint32_t f_lo, std::uint32_t f_hi) {
  return mean_square_residual(log_points(s, f_lo, f_hi), fit.alpha, fit.beta);
}

double residual(std::span<const double> freqs, std::span<const double> power, const PowerLawFit& fit) {
  return mean_square_residual(log_points(freqs, power), fit.alpha, fit.beta);
}

SectorSpectrum average_spectrum(std::span<const SectorSpectrum> spectra) {
  if (spectra.empty()) throw SpectralError(SpectralError::Kind::EmptyInput, "no spectra to average");
  const auto& freqs = spectra.front().freqs;
  for (const auto& s : spectra)
    if (!s.freqs || !(*s.freqs == *freqs))
      throw SpectralError(SpectralError::Kind::MismatchedFrequencySets, "spectra use different frequency sets");
  SectorSpectrum out;
  out.freqs = freqs;
  out.power.assign(freqs->size(), 0.0);
  for (const auto& s : spectra) {
    out.n_cells += s.n_cells;
    for (std::size_t i = 0; i < s.power.size(); ++i) out.power[i] += s.power[i];
  }
  const double inv = 1.0 / static_cast<double>(spectra.size());
  for (auto& p : out.power) p *= inv;
  out.trim();
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string spectrum_csv(const SectorSpectrum& s) {
  std::string out = "f,S\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s.frequency(i));
    out += ',';
    out += format_g9(s.at(i));
    out += '\n';
  }
  return out;
}

SectorSpectrum parse_spectrum_csv(std::string_view text, std::uint64_t window) {
  std::vector<std::uint32_t> bins;
  std::vector<double> power;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "f,S") throw SpectralError(SpectralError::Kind::InvalidConfig, "spectrum CSV must start with 'f,S'");
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw SpectralError(SpectralError::Kind::InvalidConfig, "bad spectrum CSV row");
    std::uint32_t f = 0;
    auto fs = line.substr(0, comma);
    auto [p1, e1] = std::from_chars(fs.data(), fs.data() + fs.size(), f);
    const std::string ss(line.substr(comma + 1));
    char* end = nullptr;
    const double v = std::strtod(ss.c_str(), &end);
    if (e1 != std::errc{} || p1 != fs.data() + fs.size() || end != ss.c_str() + ss.size() || v < 0)
      throw SpectralError(SpectralError::Kind::InvalidConfig, "bad spectrum CSV row '" + std::string(line) + "'");
    if (!bins.empty() && f <= bins.back())
      throw SpectralError(SpectralError::Kind::InvalidConfig, "spectrum CSV frequencies must increase");
    bins.push_back(f);
    power.push_back(v);
  }
  if (bins.empty()) throw SpectralError(SpectralError::Kind::EmptyInput, "spectrum CSV has no rows");
  if (window == 0) window = 2 * std::uint64_t{bins.back()};
  SectorSpectrum s;
  s.freqs = FrequencySet::from_bins(window, std::move(bins));
  s.power = std::move(power);
  s.trim();
  return s;
}

}  // namespace lifespec::spectral
