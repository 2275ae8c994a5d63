#include "fqn/qn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fqn/error.hpp"
#include "fqn/window.hpp"

namespace fqn {

namespace {

constexpr std::uint64_t choose2(std::uint64_t n) { return n * (n - 1) / 2; }

// Entry [n] holds d_n for 2 <= n <= 9.
constexpr std::array<double, 10> kSmallSampleDn = {
    0.0, 0.0, 0.399, 0.994, 0.512, 0.844, 0.611, 0.857, 0.669, 0.872};

std::uint64_t full_matrix_rank(std::uint64_t n) {
  return qn_pair_rank(n) + n + choose2(n);
}

QnValue scaled(double stat, std::uint64_t n, DnMode mode) {
  return {stat, dn_factor(n, mode) * kQnScale * stat};
}

}  // namespace

void QnConfig::validate() const {
  if (w < 1 || w > kMaxSemiWindow) {
    raise(ErrorCode::kInvalidParameter,
          "semi-window w must be in [1, " + std::to_string(kMaxSemiWindow) + "]");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    raise(ErrorCode::kInvalidParameter, "multiplier t must be a positive finite number");
  }
}

std::uint64_t qn_pair_rank(std::uint64_t n) { return choose2(n / 2 + 1); }

std::uint64_t qn_rank(std::uint64_t s) {
  if (s < 3 || s % 2 == 0) {
    raise(ErrorCode::kInvalidParameter,
          "qn_rank: window size must be odd and >= 3, got " + std::to_string(s));
  }
  return full_matrix_rank(s);
}

double dn_factor(std::uint64_t s, DnMode mode) {
  if (s < 2) raise(ErrorCode::kInvalidParameter, "dn_factor: sample size must be >= 2");
  if (mode == DnMode::kUnit) return 1.0;
  if (s < kSmallSampleDn.size()) return kSmallSampleDn[s];
  const double n = static_cast<double>(s);
  return s % 2 == 1 ? n / (n + 1.4) : n / (n + 3.8);
}

QnValue qn_from_sorted(std::span<const double> x, DnMode mode, MatrixSelector& selector) {
  if (x.size() < 2) raise(ErrorCode::kInvalidParameter, "qn: need at least 2 values");
  if (!std::is_sorted(x.begin(), x.end())) {
    raise(ErrorCode::kInvalidParameter, "qn_from_sorted: input is not nondecreasing");
  }
  const double stat = selector.select(DiffMatrixView(x), full_matrix_rank(x.size()));
  return scaled(stat, x.size(), mode);
}

QnValue qn_from_sorted(std::span<const double> x, DnMode mode) {
  MatrixSelector selector;
  return qn_from_sorted(x, mode, selector);
}

QnValue qn_bruteforce(std::span<const double> values, DnMode mode) {
  const std::size_t n = values.size();
  if (n < 2) raise(ErrorCode::kInvalidParameter, "qn: need at least 2 values");
  std::vector<double> diffs;
  diffs.reserve(choose2(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) diffs.push_back(std::fabs(values[i] - values[j]));
  const auto nth = diffs.begin() + static_cast<std::ptrdiff_t>(qn_pair_rank(n) - 1);
  std::nth_element(diffs.begin(), nth, diffs.end());
  return scaled(*nth, n, mode);
}

}  // namespace fqn
