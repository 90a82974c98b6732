// Game of Life stepping: bit-parallel production kernel and naive reference.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lifespec/universe.hpp"

namespace lifespec {

// Outer-totalistic rule as bitmasks over neighbour counts 0..8. Analysis paths
// only ever use life().
struct TransitionRule {
  std::uint16_t birth = 0;
  std::uint16_t survival = 0;

  static constexpr TransitionRule life() { return {1u << 3, (1u << 2) | (1u << 3)}; }
  constexpr bool next(bool alive, int neighbours) const {
    return ((alive ? survival : birth) >> neighbours) & 1u;
  }
  friend bool operator==(const TransitionRule&, const TransitionRule&) = default;
};

enum class Kernel { BitParallel, Reference };

struct EngineOptions {
  Kernel kernel = Kernel::BitParallel;
  unsigned workers = 1;
};

// Read-only view handed to run() observers after every step. changed_words
// lists, in ascending order, the indices into current.words() that differ
// from previous.words().
struct StepView {
  std::uint64_t generation;
  const Universe& current;
  const Universe& previous;
  std::span<const std::size_t> changed_words;
  bool boundary_contact;
};

using StepObserver = std::function<void(const StepView&)>;

struct RunResult {
  Universe universe;
  // Generations after which a live cell occupied the outermost ring.
  std::vector<std::uint64_t> boundary_contacts;
};

class Engine {
 public:
  explicit Engine(EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineOptions& options() const noexcept { return options_; }

  // Writes generation t+1 of `from` into `to` (resized as needed). Returns
  // true on boundary contact. `changed`, when given, receives the indices of
  // words that differ between the two.
  bool step_into(const Universe& from, Universe& to, std::vector<std::size_t>* changed = nullptr);

  Universe step(const Universe& u, bool* boundary_contact = nullptr);

  RunResult run(Universe u, std::uint64_t steps, const StepObserver& observer = {});

 private:
  class Pool;
  EngineOptions options_;
  std::unique_ptr<Pool> pool_;
  std::vector<std::vector<std::size_t>> band_changes_;
};

// Single-threaded conveniences.
Universe step(const Universe& u);
Universe reference_step(const Universe& u, TransitionRule rule = TransitionRule::life());

}  // namespace lifespec
