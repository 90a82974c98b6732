// Inputs behind the committed files in tests/golden. Shared by the render
// unit tests and the acceptance binary so both compare the same bytes.
#pragma once

#include <cmath>

#include "lifespec/classifier.hpp"
#include "lifespec/spectral.hpp"

namespace goldens {

// 6 x 4 grid using every class, laid out so no row or column is uniform.
inline lifespec::ClassMap class_map() {
  using lifespec::SectorClass;
  constexpr SectorClass N = SectorClass::Null, D = SectorClass::DcOnly, P = SectorClass::PowerLaw,
                        S = SectorClass::SharpPeaks, W = SectorClass::WhiteNoise;
  const SectorClass grid[4][6] = {
      {N, N, W, S, N, D},
      {N, W, S, S, P, N},
      {D, S, W, N, N, N},
      {N, N, P, W, S, D},
  };
  lifespec::ClassMap m;
  m.sectors_x = 6;
  m.sectors_y = 4;
  for (const auto& row : grid)
    for (auto c : row) {
      lifespec::Verdict v;
      v.cls = c;
      m.verdicts.push_back(v);
      ++m.counts[static_cast<std::size_t>(c)];
    }
  return m;
}

// S(f) = f^-2 on f = 1..128 with S(0) = 1, T = 256.
inline lifespec::spectral::SectorSpectrum power_law_spectrum() {
  lifespec::spectral::SectorSpectrum s;
  s.freqs = lifespec::spectral::FrequencySet::one_sided(256);
  s.power.push_back(1.0);
  for (int f = 1; f <= 128; ++f) s.power.push_back(1.0 / (double(f) * f));
  s.n_cells = 2500;
  return s;
}

inline lifespec::spectral::SectorSpectrum dc_only_spectrum() {
  lifespec::spectral::SectorSpectrum s;
  s.freqs = lifespec::spectral::FrequencySet::one_sided(256);
  s.power = {1e-4};
  s.n_cells = 2500;
  return s;
}

}  // namespace goldens
