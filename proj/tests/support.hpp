// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"
#include "lifespec/universe.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return LIFESPEC_TEST_DATA; }
inline std::filesystem::path golden_dir() { return LIFESPEC_TEST_GOLDEN; }

inline lifespec::Pattern load_pattern(const std::string& name) {
  return lifespec::parse_rle(lifespec::read_file(data_dir() / name));
}

inline lifespec::Universe random_universe(std::int64_t w, std::int64_t h, double density, std::mt19937_64& rng) {
  lifespec::Universe u(w, h);
  std::bernoulli_distribution alive(density);
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x)
      if (alive(rng)) u.set(x, y, true);
  return u;
}

// The transform written out term by term: (1/T) sum_t s(t) e^{-2 pi i t f / T}.
// Angles are reduced mod T in integers before the trig call.
inline std::complex<double> direct_dft(const std::vector<std::uint8_t>& s, std::uint64_t f) {
  const auto T = s.size();
  std::complex<double> acc = 0;
  for (std::uint64_t t = 0; t < T; ++t) {
    if (!s[t]) continue;
    const auto k = (t * f) % T;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(T);
    acc += std::polar(1.0, angle);
  }
  return acc / static_cast<double>(T);
}

inline std::vector<std::uint8_t> random_series(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution one(density);
  std::vector<std::uint8_t> s(n);
  for (auto& v : s) v = one(rng);
  return s;
}

}  // namespace testsupport
