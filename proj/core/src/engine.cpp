#include "lifespec/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace lifespec {
namespace {

// Next state of one row of words. up/down are empty spans outside the field.
void life_row(std::span<const std::uint64_t> up, std::span<const std::uint64_t> mid,
              std::span<const std::uint64_t> down, std::span<std::uint64_t> out, std::uint64_t tail_mask) {
  const std::size_t n = mid.size();
  const auto word = [n](std::span<const std::uint64_t> r, std::size_t j, std::ptrdiff_t d) -> std::uint64_t {
    if (r.empty()) return 0;
    const auto k = static_cast<std::ptrdiff_t>(j) + d;
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(n)) return 0;
    return r[static_cast<std::size_t>(k)];
  };
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t u = word(up, j, 0), m = mid[j], d = word(down, j, 0);
    const std::uint64_t uw = (u << 1) | (word(up, j, -1) >> 63);
    const std::uint64_t ue = (u >> 1) | (word(up, j, 1) << 63);
    const std::uint64_t mw = (m << 1) | (word(mid, j, -1) >> 63);
    const std::uint64_t me = (m >> 1) | (word(mid, j, 1) << 63);
    const std::uint64_t dw = (d << 1) | (word(down, j, -1) >> 63);
    const std::uint64_t de = (d >> 1) | (word(down, j, 1) << 63);

    // Upper and lower triples through full adders, middle pair through a half adder.
    const std::uint64_t su = uw ^ u ^ ue, cu = (uw & u) | (ue & (uw ^ u));
    const std::uint64_t sd = dw ^ d ^ de, cd = (dw & d) | (de & (dw ^ d));
    const std::uint64_t sm = mw ^ me, cm = mw & me;
    // count = ones + 2 * (cu + cd + cm + ones_carry)
    const std::uint64_t ones = su ^ sd ^ sm;
    const std::uint64_t ones_carry = (su & sd) | (sm & (su ^ sd));
    const std::uint64_t t0 = cu ^ cd ^ cm;
    const std::uint64_t t1 = (cu & cd) | (cm & (cu ^ cd));
    // Twos-count exactly 1 means count is 2 or 3.
    const std::uint64_t twos_is_one = ~t1 & (t0 ^ ones_carry);
    out[j] = twos_is_one & (ones | m);
  }
  if (n) out[n - 1] &= tail_mask;
}

void reference_row(const Universe& from, Universe& to, std::int64_t y, TransitionRule rule) {
  for (std::int64_t x = 0; x < from.width(); ++x) {
    int count = 0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if ((dx || dy) && from.get(x + dx, y + dy)) ++count;
    to.set(x, y, rule.next(from.get(x, y), count));
  }
}

}  // namespace

// Persistent workers that execute one job per band and then park. The
// calling thread takes band 0.
class Engine::Pool {
 public:
  explicit Pool(unsigned workers) {
    for (unsigned i = 1; i < workers; ++i) threads_.emplace_back([this, i] { loop(i); });
  }
  ~Pool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  unsigned size() const noexcept { return static_cast<unsigned>(threads_.size()) + 1; }

  void run(const std::function<void(unsigned)>& job) {
    if (threads_.empty()) {
      job(0);
      return;
    }
    {
      std::lock_guard lk(mu_);
      job_ = &job;
      pending_ = static_cast<unsigned>(threads_.size());
      ++epoch_;
    }
    start_cv_.notify_all();
    job(0);
    std::unique_lock lk(mu_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void loop(unsigned band) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(unsigned)>* job = nullptr;
      {
        std::unique_lock lk(mu_);
        start_cv_.wait(lk, [&] { return stop_ || epoch_ != seen; });
        if (stop_) return;
        seen = epoch_;
        job = job_;
      }
      (*job)(band);
      {
        std::lock_guard lk(mu_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_, done_cv_;
  const std::function<void(unsigned)>* job_ = nullptr;
  unsigned pending_ = 0;
  std::uint64_t epoch_ = 0;
  bool stop_ = false;
};

Engine::Engine(EngineOptions options)
    : options_(options), pool_(std::make_unique<Pool>(std::max(1u, options.workers))) {
  band_changes_.resize(pool_->size());
}

Engine::~Engine() = default;

bool Engine::step_into(const Universe& from, Universe& to, std::vector<std::size_t>* changed) {
  if (to.width() != from.width() || to.height() != from.height()) to = Universe(from.width(), from.height());
  const std::int64_t h = from.height();
  const unsigned bands = pool_->size();
  const std::size_t wpr = from.words_per_row();

  const std::function<void(unsigned)> job = [&](unsigned band) {
    const std::int64_t y0 = h * band / bands;
    const std::int64_t y1 = h * (band + 1) / bands;
    auto& local = band_changes_[band];
    local.clear();
    for (std::int64_t y = y0; y < y1; ++y) {
      if (options_.kernel == Kernel::BitParallel) {
        life_row(y > 0 ? from.row(y - 1) : std::span<const std::uint64_t>{}, from.row(y),
                 y + 1 < h ? from.row(y + 1) : std::span<const std::uint64_t>{}, to.row(y), from.tail_mask());
      } else {
        reference_row(from, to, y, TransitionRule::life());
      }
      if (changed) {
        auto a = from.row(y);
        auto b = to.row(y);
        for (std::size_t j = 0; j < wpr; ++j)
          if (a[j] != b[j]) local.push_back(static_cast<std::size_t>(y) * wpr + j);
      }
    }
  };
  pool_->run(job);

  if (changed) {
    changed->clear();
    for (const auto& local : band_changes_) changed->insert(changed->end(), local.begin(), local.end());
  }
  to.set_generation(from.generation() + 1);
  return to.touches_boundary();
}

Universe Engine::step(const Universe& u, bool* boundary_contact) {
  Universe next(u.width(), u.height());
  const bool contact = step_into(u, next);
  if (boundary_contact) *boundary_contact = contact;
  return next;
}

RunResult Engine::run(Universe u, std::uint64_t steps, const StepObserver& observer) {
  RunResult result;
  Universe other(u.width(), u.height());
  std::vector<std::size_t> changed;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const bool contact = step_into(u, other, observer ? &changed : nullptr);
    std::swap(u, other);
    if (contact) result.boundary_contacts.push_back(u.generation());
    if (observer) observer(StepView{u.generation(), u, other, changed, contact});
  }
  result.universe = std::move(u);
  return result;
}

Universe step(const Universe& u) {
  Engine engine;
  return engine.step(u);
}

Universe reference_step(const Universe& u, TransitionRule rule) {
  Universe next(u.width(), u.height());
  for (std::int64_t y = 0; y < u.height(); ++y) reference_row(u, next, y, rule);
  next.set_generation(u.generation() + 1);
  return next;
}

}  // namespace lifespec
