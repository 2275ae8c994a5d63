#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fqn {

// Largest accepted semi-window. Keeps s*s comfortably inside 64 bits and
// the two window buffers bounded.
inline constexpr std::size_t kMaxSemiWindow = std::size_t{1} << 24;

struct Sample {
  std::uint64_t index = 0;  // 1-based stream position
  double value = 0.0;
};

struct UpdateOutcome {
  std::optional<double> evicted;  // set iff the window was full before the push
  bool full = false;
};

// Removes one occurrence of `v` from the nondecreasing sequence `sorted` and
// returns the 0-based position it was removed from. Throws kInternal if `v`
// is absent: the caller's two window views have diverged.
std::size_t sorted_delete(std::vector<double>& sorted, double v);

// Inserts `v` keeping `sorted` nondecreasing; returns the 0-based position.
std::size_t sorted_insert(std::vector<double>& sorted, double v);

// Sliding window of s = 2w+1 samples held twice: in arrival order (a ring)
// and as a sorted mirror. Each push evicts the oldest sample once full and
// costs at most one contiguous shift for the delete plus one for the insert.
//
// Positions exposed through sorted() are 0-based; the median is the
// (w+1)-th smallest in 1-based terms, i.e. sorted()[w].
class SlidingWindow {
 public:
  explicit SlidingWindow(std::size_t w);

  UpdateOutcome push(const Sample& x);

  double median() const;

  std::size_t semi_window() const noexcept { return w_; }
  std::size_t capacity() const noexcept { return ring_.size(); }
  std::size_t count() const noexcept { return count_; }
  bool full() const noexcept { return count_ == ring_.size(); }

  std::span<const double> sorted() const noexcept { return sorted_; }

  // i-th oldest sample currently held, 0 <= i < count().
  const Sample& at_age(std::size_t i) const;

  // Arrival-order copy, oldest first.
  std::vector<Sample> arrival() const;

  // Element moves (shifted slots) performed by the most recent push.
  std::size_t last_moves() const noexcept { return last_moves_; }

 private:
  std::size_t w_;
  std::vector<Sample> ring_;
  std::size_t head_ = 0;  // slot of the oldest sample
  std::size_t count_ = 0;
  std::vector<double> sorted_;
  std::size_t last_moves_ = 0;
};

}  // namespace fqn
