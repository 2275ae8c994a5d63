#include "fqn/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fqn/error.hpp"

namespace fqn {

Verdict make_verdict(std::uint64_t index, double value, double median, double qn, double t) {
  Verdict v;
  v.index = index;
  v.value = value;
  v.median = median;
  v.qn = qn;
  v.score = std::fabs(value - median);
  v.is_outlier = v.score > t * qn;
  return v;
}

Detector::Detector(const QnConfig& config)
    : config_((config.validate(), config)),
      window_(config.w),
      rank_(qn_rank(config.window_size())),
      dn_(dn_factor(config.window_size(), config.dn_mode)) {}

std::uint64_t Detector::next_test_index() const noexcept {
  return next_index_ <= config_.window_size() ? config_.w + 1 : next_index_ - config_.w;
}

std::optional<Verdict> Detector::step(const Sample& x) {
  if (x.index != next_index_) {
    raise(ErrorCode::kInvalidParameter, "detector expected stream index " +
                                            std::to_string(next_index_) + ", got " +
                                            std::to_string(x.index));
  }
  const UpdateOutcome outcome = window_.push(x);
  ++next_index_;
  if (!outcome.full) return std::nullopt;

  const std::span<const double> sorted = window_.sorted();
  const double median = sorted[config_.w];
  const double stat = selector_.select(DiffMatrixView(sorted), rank_);
  const Sample& center = window_.at_age(config_.w);
  return make_verdict(center.index, center.value, median, dn_ * kQnScale * stat, config_.t);
}

std::optional<Verdict> Detector::step(double value) { return step(Sample{next_index_, value}); }

std::vector<Verdict> detect_all(std::span<const double> stream, const QnConfig& config) {
  Detector detector(config);
  std::vector<Verdict> out;
  if (stream.size() > 2 * config.w) out.reserve(stream.size() - 2 * config.w);
  for (const double v : stream) {
    if (auto verdict = detector.step(v)) out.push_back(*verdict);
  }
  return out;
}

ReferenceDetector::ReferenceDetector(const QnConfig& config)
    : config_((config.validate(), config)) {}

std::optional<Verdict> ReferenceDetector::step(double value) {
  if (!std::isfinite(value)) {
    raise(ErrorCode::kRejectedSample, "non-finite sample at index " + std::to_string(next_index_));
  }
  const std::size_t s = config_.window_size();
  window_.push_back(value);
  if (window_.size() > s) window_.pop_front();
  const std::uint64_t index = next_index_++;
  if (window_.size() < s) return std::nullopt;

  scratch_.assign(window_.begin(), window_.end());
  const auto mid = scratch_.begin() + static_cast<std::ptrdiff_t>(config_.w);
  std::nth_element(scratch_.begin(), mid, scratch_.end());
  const double median = *mid;
  const QnValue q = qn_bruteforce(scratch_, config_.dn_mode);
  return make_verdict(index - config_.w, window_[config_.w], median, q.qn, config_.t);
}

std::vector<Verdict> detect_all_reference(std::span<const double> stream,
                                          const QnConfig& config) {
  ReferenceDetector detector(config);
  std::vector<Verdict> out;
  for (const double v : stream) {
    if (auto verdict = detector.step(v)) out.push_back(*verdict);
  }
  return out;
}

}  // namespace fqn
