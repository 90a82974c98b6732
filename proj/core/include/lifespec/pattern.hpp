// Golly-compatible RLE pattern reading, writing, and placement.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lifespec/universe.hpp"

namespace lifespec {

inline constexpr std::string_view kLifeRule = "B3/S23";

struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// A decoded pattern. live_cells is kept sorted row-major (by y, then x) so
// two patterns with the same cells compare equal.
struct Pattern {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::string rule{kLifeRule};
  std::vector<Cell> live_cells;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

class RleError : public std::runtime_error {
 public:
  enum class Kind { MalformedHeader, UnsupportedRule, RunOverflow, UnexpectedSymbol };

  RleError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct RleOptions {
  // Accept rule strings other than Life. Analysis paths still assume B3/S23.
  bool permissive_rule = false;
};

Pattern parse_rle(std::string_view text, const RleOptions& options = {});

// Canonical RLE: header with rule, maximal runs, trailing dead cells of a row
// dropped, trailing empty rows dropped, body lines wrapped at 70 columns.
// An empty pattern is written with body "b!".
std::string write_rle(const Pattern& pattern);

// Normalizes a rule spelling ("b3/s23", "23/3") to "B3/S23" when it denotes
// Life; returns the input unchanged otherwise.
std::string normalize_rule(std::string_view rule);

class AllocationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultMargin = 64;
inline constexpr std::uint64_t kDefaultUniverseBudget = std::uint64_t{8} << 30;

// Builds a universe of (width + 2*margin) x (height + 2*margin) holding the
// pattern's live cells offset by (margin, margin), at generation 0.
Universe place(const Pattern& pattern, std::int64_t margin = kDefaultMargin,
               std::uint64_t max_bytes = kDefaultUniverseBudget);

// Inverse of place() over the whole universe: every live cell, no margin.
Pattern extract(const Universe& universe);

}  // namespace lifespec
