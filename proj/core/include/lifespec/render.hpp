// Static outputs: grayscale sector map (binary PGM) and spectrum plots (SVG).
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "lifespec/classifier.hpp"
#include "lifespec/spectral.hpp"

namespace lifespec::render {

struct Palette {
  // Indexed by SectorClass.
  std::array<std::uint8_t, 5> gray{230, 230, 0, 128, 255};

  static Palette standard() { return {}; }
  // DcOnly gets its own gray level instead of sharing the blank of Null.
  static Palette distinct_dc() {
    Palette p;
    p.gray[static_cast<std::size_t>(SectorClass::DcOnly)] = 200;
    return p;
  }
  std::uint8_t operator[](SectorClass c) const noexcept { return gray[static_cast<std::size_t>(c)]; }
};

// "P5\n<w> <h>\n255\n" followed by one byte per pixel, rows top to bottom.
// Each sector is a scale x scale block.
std::string render_map(const ClassMap& map, const Palette& palette = {}, int scale = 1);

class EmptySpectrum : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PlotOptions {
  bool linear_x = false;
  std::uint32_t fit_upper = 100;
};

// 800x600 SVG 1.1 plot of S(f) for f >= 1 (element id "spectrum"), the DC
// value as text (id "dc"), and the fit as a dashed line over [1, f_u]
// (id "fit") when given. Bins with S = 0 are omitted on the log axis.
std::string render_spectrum(const spectral::SectorSpectrum& s, const std::optional<spectral::PowerLawFit>& fit,
                            const PlotOptions& options = {});

}  // namespace lifespec::render
