// Five-way classification of sector spectra.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lifespec/analyzer.hpp"
#include "lifespec/spectral.hpp"

namespace lifespec {

enum class SectorClass : std::uint8_t { Null, DcOnly, PowerLaw, SharpPeaks, WhiteNoise };

inline constexpr std::array<SectorClass, 5> kAllClasses{SectorClass::Null, SectorClass::DcOnly, SectorClass::PowerLaw,
                                                        SectorClass::SharpPeaks, SectorClass::WhiteNoise};

std::string_view to_string(SectorClass c);
std::optional<SectorClass> parse_sector_class(std::string_view name);

struct ClassifierConfig {
  std::uint32_t fit_upper = 100;
  double beta_max = -0.2;
  double sigma2_max = 1.5;
  double peak_ratio = 50.0;
  bool peaks_first = false;

  static ClassifierConfig from(const spectral::AnalysisConfig& cfg);
};

struct Verdict {
  SectorClass cls = SectorClass::Null;
  std::optional<spectral::PowerLawFit> fit;
  std::optional<std::uint32_t> peak_bin;  // argmax of S(f), f >= 1
  std::optional<double> peak_ratio;       // max / median of positive S(f >= 1)
};

// Decision sequence:
//   1. all S == 0                               -> Null
//   2. S(0) > 0, every S(f >= 1) == 0           -> DcOnly
//   3. fit over [1, f_u] with beta <= beta_max
//      and sigma2 <= sigma2_max                 -> PowerLaw
//   4. max S(f >= 1) >= peak_ratio * median of
//      the positive S(f >= 1)                   -> SharpPeaks
//   5. otherwise                                -> WhiteNoise
// peaks_first swaps 3 and 4.
Verdict judge(const spectral::SectorSpectrum& s, const ClassifierConfig& cfg);
inline SectorClass classify(const spectral::SectorSpectrum& s, const ClassifierConfig& cfg) {
  return judge(s, cfg).cls;
}

struct ClassMap {
  std::int64_t sectors_x = 0;
  std::int64_t sectors_y = 0;
  std::vector<Verdict> verdicts;  // row-major
  std::array<std::uint64_t, 5> counts{};

  SectorClass at(std::int64_t sx, std::int64_t sy) const {
    return verdicts.at(static_cast<std::size_t>(sy * sectors_x + sx)).cls;
  }
  std::uint64_t count(SectorClass c) const noexcept { return counts[static_cast<std::size_t>(c)]; }
};

class IncompleteGrid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// spectra must hold exactly one spectrum per sector of the grid, any order.
ClassMap classify_map(std::span<const spectral::SectorSpectrum> spectra, std::int64_t sectors_x,
                      std::int64_t sectors_y, const ClassifierConfig& cfg, unsigned workers = 1);

// "sector_x,sector_y,class,beta,sigma2,peak_bin"; fit fields empty when no
// fit was computed.
std::string class_map_csv(const ClassMap& map);
ClassMap parse_class_map_csv(std::string_view text);

}  // namespace lifespec
