#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "fqn/matrix_select.hpp"

namespace fqn {

// Asymptotic consistency constant for the Qn statistic under a Gaussian model.
inline constexpr double kQnScale = 2.2219;

enum class DnMode {
  kUnit,          // d_n = 1; the detector's multiplier absorbs the constant
  kFiniteSample,  // small-sample correction tabulated by Rousseeuw and Croux
};

struct QnConfig {
  std::size_t w = 1;
  double t = 3.0;
  DnMode dn_mode = DnMode::kFiniteSample;

  std::size_t window_size() const noexcept { return 2 * w + 1; }
  // Throws kInvalidParameter on w outside [1, kMaxSemiWindow] or t not a positive finite.
  void validate() const;
};

struct QnValue {
  double stat = 0.0;  // k-th smallest pairwise absolute difference
  double qn = 0.0;    // d_n * kQnScale * stat
};

// Rank of the k'-th smallest positive-side difference inside the full s x s
// difference matrix: C(h,2) + s + C(s,2) with h = floor(s/2) + 1.
// Streaming windows only: requires odd s >= 3.
std::uint64_t qn_rank(std::uint64_t s);

// C(floor(n/2)+1, 2): the order statistic taken among the C(n,2) differences.
std::uint64_t qn_pair_rank(std::uint64_t n);

double dn_factor(std::uint64_t s, DnMode mode);

// Qn of a nondecreasing sample via linear-time matrix selection. Any size
// n >= 2 is accepted for static use; the streaming path always has n = 2w+1.
// Throws kInvalidParameter if x is not sorted.
QnValue qn_from_sorted(std::span<const double> x, DnMode mode);
QnValue qn_from_sorted(std::span<const double> x, DnMode mode, MatrixSelector& selector);

// Reference computation: materializes all C(n,2) absolute differences and
// selects the k'-th. O(n^2) memory and time.
QnValue qn_bruteforce(std::span<const double> values, DnMode mode);

}  // namespace fqn
