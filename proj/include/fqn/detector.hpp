#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "fqn/matrix_select.hpp"
#include "fqn/qn.hpp"
#include "fqn/window.hpp"

namespace fqn {

struct Verdict {
  std::uint64_t index = 0;  // stream position of the tested (center) item
  double value = 0.0;
  double median = 0.0;
  double qn = 0.0;
  double score = 0.0;  // |value - median|
  bool is_outlier = false;
};

// is_outlier is strict: a score equal to t * qn is an inlier.
Verdict make_verdict(std::uint64_t index, double value, double median, double qn, double t);

// Streaming Qn outlier detector. Every push after the first 2w fills a
// window of s = 2w+1 items and tests the item w positions behind the newest
// one against t * Qn around the window median. O(s) worst case per push.
class Detector {
 public:
  explicit Detector(const QnConfig& config);

  // Appends the next stream item (index assigned internally, 1-based).
  std::optional<Verdict> step(double value);
  // Same, but the caller supplies the index, which must be the next one.
  std::optional<Verdict> step(const Sample& x);

  const QnConfig& config() const noexcept { return config_; }
  const SlidingWindow& window() const noexcept { return window_; }
  std::uint64_t next_index() const noexcept { return next_index_; }
  // Stream index of the item the next verdict will test.
  std::uint64_t next_test_index() const noexcept;
  const SelectStats& select_stats() const noexcept { return selector_.stats(); }

 private:
  QnConfig config_;
  SlidingWindow window_;
  MatrixSelector selector_;
  std::uint64_t rank_;
  double dn_;
  std::uint64_t next_index_ = 1;
};

// Runs a detector over a finite stream; yields max(0, N - 2w) verdicts.
std::vector<Verdict> detect_all(std::span<const double> stream, const QnConfig& config);

// Naive per-window recomputation: sorts a copy of each window for the median
// and runs qn_bruteforce. Used as the correctness oracle and speed baseline.
class ReferenceDetector {
 public:
  explicit ReferenceDetector(const QnConfig& config);

  std::optional<Verdict> step(double value);

 private:
  QnConfig config_;
  std::deque<double> window_;
  std::vector<double> scratch_;
  std::uint64_t next_index_ = 1;
};

std::vector<Verdict> detect_all_reference(std::span<const double> stream,
                                          const QnConfig& config);

}  // namespace fqn
