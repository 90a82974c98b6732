#include "lifespec/universe.hpp"

#include <stdexcept>

namespace lifespec {

Universe::Universe(std::int64_t width, std::int64_t height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("universe dimensions must be non-negative");
  words_per_row_ = static_cast<std::size_t>((width + 63) / 64);
  const int tail_bits = static_cast<int>(width % 64);
  tail_mask_ = tail_bits == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail_bits) - 1;
  words_.assign(words_per_row_ * static_cast<std::size_t>(height), 0);
}

void Universe::set(std::int64_t x, std::int64_t y, bool alive) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) throw std::out_of_range("cell outside universe");
  const std::uint64_t bit = std::uint64_t{1} << (x & 63);
  auto& w = words_[index(x, y)];
  w = alive ? (w | bit) : (w & ~bit);
}

std::uint64_t Universe::population() const noexcept {
  std::uint64_t n = 0;
  for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

bool Universe::touches_boundary() const noexcept {
  if (width_ == 0 || height_ == 0) return false;
  for (auto w : row(0))
    if (w) return true;
  for (auto w : row(height_ - 1))
    if (w) return true;
  const std::uint64_t last_bit = std::uint64_t{1} << ((width_ - 1) & 63);
  for (std::int64_t y = 1; y + 1 < height_; ++y) {
    auto r = row(y);
    if ((r.front() & 1u) || (r.back() & last_bit)) return true;
  }
  return false;
}

std::uint64_t Universe::bytes_for(std::int64_t width, std::int64_t height) noexcept {
  return static_cast<std::uint64_t>((width + 63) / 64) * static_cast<std::uint64_t>(height) * 8;
}

}  // namespace lifespec
