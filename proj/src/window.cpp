#include "fqn/window.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fqn/error.hpp"

namespace fqn {

std::size_t sorted_delete(std::vector<double>& sorted, double v) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) {
    raise(ErrorCode::kInternal,
          "sorted_delete: value " + std::to_string(v) + " not present in sorted window");
  }
  const auto pos = static_cast<std::size_t>(it - sorted.begin());
  sorted.erase(it);
  return pos;
}

std::size_t sorted_insert(std::vector<double>& sorted, double v) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), v);
  const auto pos = static_cast<std::size_t>(it - sorted.begin());
  sorted.insert(it, v);
  return pos;
}

SlidingWindow::SlidingWindow(std::size_t w) : w_(w) {
  if (w == 0) raise(ErrorCode::kInvalidParameter, "semi-window w must be >= 1");
  if (w > kMaxSemiWindow) {
    raise(ErrorCode::kInvalidParameter,
          "semi-window w exceeds maximum " + std::to_string(kMaxSemiWindow));
  }
  ring_.resize(2 * w + 1);
  sorted_.reserve(2 * w + 1);
}

UpdateOutcome SlidingWindow::push(const Sample& x) {
  if (!std::isfinite(x.value)) {
    raise(ErrorCode::kRejectedSample, "non-finite sample at index " + std::to_string(x.index));
  }
  if (count_ > 0) {
    const Sample& newest = ring_[(head_ + count_ - 1) % ring_.size()];
    if (x.index <= newest.index) {
      raise(ErrorCode::kInvalidParameter, "sample indices must strictly increase");
    }
  }

  UpdateOutcome out;
  last_moves_ = 0;
  if (full()) {
    const double old = ring_[head_].value;
    const std::size_t pos = sorted_delete(sorted_, old);
    last_moves_ += sorted_.size() - pos;
    out.evicted = old;
    ring_[head_] = x;
    head_ = (head_ + 1) % ring_.size();
  } else {
    ring_[(head_ + count_) % ring_.size()] = x;
    ++count_;
  }
  const std::size_t pos = sorted_insert(sorted_, x.value);
  last_moves_ += sorted_.size() - 1 - pos;
  out.full = full();
  return out;
}

double SlidingWindow::median() const {
  if (!full()) raise(ErrorCode::kNotReady, "median requested before the window is full");
  return sorted_[w_];
}

const Sample& SlidingWindow::at_age(std::size_t i) const {
  if (i >= count_) raise(ErrorCode::kInvalidParameter, "window position out of range");
  return ring_[(head_ + i) % ring_.size()];
}

std::vector<Sample> SlidingWindow::arrival() const {
  std::vector<Sample> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(ring_[(head_ + i) % ring_.size()]);
  return out;
}

}  // namespace fqn
