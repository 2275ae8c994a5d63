#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fqn {

struct RankPair {
  double lo = 0.0;  // k2-th smallest
  double hi = 0.0;  // k1-th smallest
};

// Buffers reused across select_pair calls.
struct SelectWorkspace {
  std::vector<double> values;
  std::vector<std::uint32_t> buckets;
};

// k-th smallest (1-based) of `values`, reordering them. Expected O(n).
double quickselect(std::span<double> values, std::uint64_t k);

// lo_rank-th and hi_rank-th smallest (1-based, lo_rank <= hi_rank) in
// expected O(n). `values` is clobbered; `work` is grown as needed.
RankPair select_pair(std::span<double> values, std::uint64_t lo_rank, std::uint64_t hi_rank,
                     SelectWorkspace& work);

// True when partition passes use the AVX-512 kernel on this machine.
bool select_uses_avx512() noexcept;

}  // namespace fqn
