// Bit-packed bounded Life universe.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lifespec {

// Row-major field of cells, one bit per cell, 64 cells per word. Bit i of word
// j in row y holds cell x = 64*j + i. Padding bits past `width` are always 0
// and every cell outside [0,width) x [0,height) is dead.
class Universe {
 public:
  Universe() = default;
  Universe(std::int64_t width, std::int64_t height);

  std::int64_t width() const noexcept { return width_; }
  std::int64_t height() const noexcept { return height_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }
  std::uint64_t generation() const noexcept { return generation_; }
  void set_generation(std::uint64_t g) noexcept { generation_ = g; }

  bool get(std::int64_t x, std::int64_t y) const noexcept {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return (words_[index(x, y)] >> (x & 63)) & 1u;
  }
  void set(std::int64_t x, std::int64_t y, bool alive);

  std::span<const std::uint64_t> row(std::int64_t y) const noexcept {
    return {words_.data() + static_cast<std::size_t>(y) * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> row(std::int64_t y) noexcept {
    return {words_.data() + static_cast<std::size_t>(y) * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  // Mask of valid bits in the last word of each row.
  std::uint64_t tail_mask() const noexcept { return tail_mask_; }

  std::uint64_t population() const noexcept;

  // True when any live cell sits on the outermost ring of the field.
  bool touches_boundary() const noexcept;

  static std::uint64_t bytes_for(std::int64_t width, std::int64_t height) noexcept;

  // Cell-for-cell equality; the generation counter is not compared.
  bool same_cells(const Universe& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && words_ == other.words_;
  }
  friend bool operator==(const Universe& a, const Universe& b) noexcept {
    return a.same_cells(b) && a.generation_ == b.generation_;
  }

 private:
  std::size_t index(std::int64_t x, std::int64_t y) const noexcept {
    return static_cast<std::size_t>(y) * words_per_row_ + static_cast<std::size_t>(x >> 6);
  }

  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::size_t words_per_row_ = 0;
  std::uint64_t tail_mask_ = 0;
  std::uint64_t generation_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::uint64_t population(const Universe& u) noexcept { return u.population(); }

}  // namespace lifespec
