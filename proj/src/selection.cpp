#include "fqn/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "fqn/error.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define FQN_AVX512_KERNEL 1
#endif

// Selection narrows a range with two kinds of pass, each a single sweep that
// reads one buffer and writes the other:
//  - a band pass keeps the values in [lower, upper], with thresholds taken
//    from a small sample so that the band most likely holds the wanted ranks;
//  - a pivot pass sends values below the pivot to the front of the range and
//    values above it to the back, leaving the run of ties implied in between.
// Pivot passes keep every value at a position consistent with its rank, so
// a pair of ranks that part ways can be finished independently.

namespace fqn {
namespace {

constexpr std::size_t kSmall = 16;
constexpr std::size_t kSample = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct SmallRanks {
  alignas(64) double value[kSmall];
  alignas(64) std::int64_t less[kSmall];
  alignas(64) std::int64_t upto[kSmall];

  // The value whose tie range covers rank `want` (0-based).
  double pick(std::size_t want) const;
  double pick_scalar(std::size_t want) const {
    const auto k = static_cast<std::int64_t>(want);
    unsigned hits = 0;
    for (std::size_t i = 0; i < kSmall; ++i) {
      hits |= static_cast<unsigned>(less[i] <= k && k < upto[i]) << i;
    }
    return value[__builtin_ctz(hits | (1U << kSmall)) & (kSmall - 1)];
  }
};

struct Split {
  std::size_t below = 0;
  std::size_t kept = 0;  // band pass: values in the band; pivot pass: values above
};

#ifdef FQN_AVX512_KERNEL
#define FQN_AVX512 __attribute__((target("avx512f,popcnt")))

FQN_AVX512 inline unsigned lanes(__mmask8 m) {
  return static_cast<unsigned>(_mm_popcnt_u32(m));
}

FQN_AVX512 inline void emit_front(__m512d v, __mmask8 m, double* dst, std::size_t& out) {
  const unsigned c = lanes(m);
  _mm512_mask_storeu_pd(dst + out, static_cast<__mmask8>((1U << c) - 1),
                        _mm512_maskz_compress_pd(m, v));
  out += c;
}

// Fills backwards from dst: after the call dst[-back, 0) holds the emitted values.
FQN_AVX512 inline void emit_back(__m512d v, __mmask8 m, double* dst, std::size_t& back) {
  const unsigned c = lanes(m);
  back += c;
  _mm512_mask_storeu_pd(dst - back, static_cast<__mmask8>((1U << c) - 1),
                        _mm512_maskz_compress_pd(m, v));
}

FQN_AVX512 Split band_avx512(const double* src, std::size_t n, double* dst, double lower,
                             double upper) {
  const __m512d lo = _mm512_set1_pd(lower);
  const __m512d hi = _mm512_set1_pd(upper);
  Split s;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(src + i);
    const __mmask8 ge = _mm512_cmp_pd_mask(v, lo, _CMP_GE_OQ);
    s.below += 8 - lanes(ge);
    emit_front(v, _mm512_mask_cmp_pd_mask(ge, v, hi, _CMP_LE_OQ), dst, s.kept);
  }
  if (i < n) {
    const auto live = static_cast<__mmask8>((1U << (n - i)) - 1);
    const __m512d v = _mm512_maskz_loadu_pd(live, src + i);
    const __mmask8 ge = _mm512_mask_cmp_pd_mask(live, v, lo, _CMP_GE_OQ);
    s.below += n - i - lanes(ge);
    emit_front(v, _mm512_mask_cmp_pd_mask(ge, v, hi, _CMP_LE_OQ), dst, s.kept);
  }
  return s;
}

FQN_AVX512 Split pivot_avx512(const double* src, std::size_t n, double* dst, double pivot) {
  const __m512d p = _mm512_set1_pd(pivot);
  double* end = dst + n;
  Split s;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(src + i);
    emit_front(v, _mm512_cmp_pd_mask(v, p, _CMP_LT_OQ), dst, s.below);
    emit_back(v, _mm512_cmp_pd_mask(v, p, _CMP_GT_OQ), end, s.kept);
  }
  if (i < n) {
    const auto live = static_cast<__mmask8>((1U << (n - i)) - 1);
    const __m512d v = _mm512_maskz_loadu_pd(live, src + i);
    emit_front(v, _mm512_mask_cmp_pd_mask(live, v, p, _CMP_LT_OQ), dst, s.below);
    emit_back(v, _mm512_mask_cmp_pd_mask(live, v, p, _CMP_GT_OQ), end, s.kept);
  }
  return s;
}

// Ranks of n <= 16 values, padded to 16 with +inf. Lane i of the counters
// holds how many values fall below / at or below value i. Fixed trip counts.
FQN_AVX512 void rank_small_avx512(const double* values, std::size_t n, SmallRanks& r) {
  const auto live0 = static_cast<__mmask8>(n >= 8 ? 0xff : (1U << n) - 1);
  const auto live1 = static_cast<__mmask8>(n >= 16 ? 0xff : n > 8 ? (1U << (n - 8)) - 1 : 0);
  const __m512d inf = _mm512_set1_pd(kInf);
  const __m512d z0 = _mm512_mask_loadu_pd(inf, live0, values);
  const __m512d z1 = _mm512_mask_loadu_pd(inf, live1, values + 8);
  _mm512_store_pd(r.value, z0);
  _mm512_store_pd(r.value + 8, z1);
  const __m512i one = _mm512_set1_epi64(1);
  __m512i less0 = _mm512_setzero_si512();
  __m512i less1 = _mm512_setzero_si512();
  __m512i upto0 = _mm512_setzero_si512();
  __m512i upto1 = _mm512_setzero_si512();
  for (int j = 0; j < 16; ++j) {
    const __m512d b = _mm512_set1_pd(r.value[j]);
    less0 = _mm512_mask_add_epi64(less0, _mm512_cmp_pd_mask(b, z0, _CMP_LT_OQ), less0, one);
    less1 = _mm512_mask_add_epi64(less1, _mm512_cmp_pd_mask(b, z1, _CMP_LT_OQ), less1, one);
    upto0 = _mm512_mask_add_epi64(upto0, _mm512_cmp_pd_mask(b, z0, _CMP_LE_OQ), upto0, one);
    upto1 = _mm512_mask_add_epi64(upto1, _mm512_cmp_pd_mask(b, z1, _CMP_LE_OQ), upto1, one);
  }
  _mm512_store_si512(r.less, less0);
  _mm512_store_si512(r.less + 8, less1);
  _mm512_store_si512(r.upto, upto0);
  _mm512_store_si512(r.upto + 8, upto1);
}

FQN_AVX512 double pick_avx512(const SmallRanks& r, std::size_t want) {
  const __m512i k = _mm512_set1_epi64(static_cast<long long>(want));
  const unsigned hit0 = _mm512_mask_cmpgt_epi64_mask(
      _mm512_cmple_epi64_mask(_mm512_load_si512(r.less), k), _mm512_load_si512(r.upto), k);
  const unsigned hit1 = _mm512_mask_cmpgt_epi64_mask(
      _mm512_cmple_epi64_mask(_mm512_load_si512(r.less + 8), k), _mm512_load_si512(r.upto + 8),
      k);
  return r.value[__builtin_ctz(hit0 | (hit1 << 8) | 0x10000U) & 15];
}

FQN_AVX512 void range_avx512(const double* src, std::size_t n, double& lo, double& hi) {
  __m512d mn = _mm512_set1_pd(kInf);
  __m512d mx = _mm512_set1_pd(-kInf);
  __m512d mn2 = mn;
  __m512d mx2 = mx;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m512d v = _mm512_loadu_pd(src + i);
    const __m512d u = _mm512_loadu_pd(src + i + 8);
    mn = _mm512_min_pd(mn, v);
    mx = _mm512_max_pd(mx, v);
    mn2 = _mm512_min_pd(mn2, u);
    mx2 = _mm512_max_pd(mx2, u);
  }
  mn = _mm512_min_pd(mn, mn2);
  mx = _mm512_max_pd(mx, mx2);
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(src + i);
    mn = _mm512_min_pd(mn, v);
    mx = _mm512_max_pd(mx, v);
  }
  if (i < n) {
    const auto live = static_cast<__mmask8>((1U << (n - i)) - 1);
    const __m512d v = _mm512_maskz_loadu_pd(live, src + i);
    mn = _mm512_mask_min_pd(mn, live, mn, v);
    mx = _mm512_mask_max_pd(mx, live, mx, v);
  }
  lo = _mm512_reduce_min_pd(mn);
  hi = _mm512_reduce_max_pd(mx);
}

FQN_AVX512 void bucket_avx512(const double* src, std::size_t n, double lo, double scale,
                              std::uint32_t top, std::uint32_t* out) {
  const __m512d base = _mm512_set1_pd(lo);
  const __m512d mul = _mm512_set1_pd(scale);
  const __m256i cap = _mm256_set1_epi32(static_cast<int>(top));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d t = _mm512_mul_pd(_mm512_sub_pd(_mm512_loadu_pd(src + i), base), mul);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_min_epu32(_mm512_cvttpd_epu32(t), cap));
  }
  for (; i < n; ++i) {
    out[i] = std::min(static_cast<std::uint32_t>((src[i] - lo) * scale), top);
  }
}

// Copies the values whose bucket is `a` to dst_a and those whose bucket is
// `b` (when different) to dst_b.
FQN_AVX512 void gather_avx512(const double* src, const std::uint32_t* bucket, std::size_t n,
                              std::uint32_t a, std::uint32_t b, double* dst_a, double* dst_b) {
  const __m512i va = _mm512_set1_epi64(a);
  const __m512i vb = _mm512_set1_epi64(b);
  const bool two = a != b;
  std::size_t out_a = 0;
  std::size_t out_b = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(src + i);
    const __m512i id = _mm512_cvtepu32_epi64(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bucket + i)));
    emit_front(v, _mm512_cmpeq_epi64_mask(id, va), dst_a, out_a);
    if (two) emit_front(v, _mm512_cmpeq_epi64_mask(id, vb), dst_b, out_b);
  }
  for (; i < n; ++i) {
    if (bucket[i] == a) dst_a[out_a++] = src[i];
    if (two && bucket[i] == b) dst_b[out_b++] = src[i];
  }
}

bool cpu_has_avx512() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("popcnt");
}
#endif

// FQN_DISABLE_AVX512 (any value) forces the portable kernels.
bool use_avx512() {
#ifdef FQN_AVX512_KERNEL
  static const bool enabled = cpu_has_avx512() && std::getenv("FQN_DISABLE_AVX512") == nullptr;
  return enabled;
#else
  return false;
#endif
}

// Writes the values of src[0, n) in [lower, upper] to the front of dst.
Split band_pass(const double* src, std::size_t n, double* dst, double lower, double upper) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) return band_avx512(src, n, dst, lower, upper);
#endif
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = src[i];
    dst[s.kept] = v;
    s.kept += (v >= lower) & (v <= upper);
    s.below += v < lower;
  }
  return s;
}

// Writes values below the pivot to the front of dst[0, n) and values above
// it to the back.
Split pivot_pass(const double* src, std::size_t n, double* dst, double pivot) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) return pivot_avx512(src, n, dst, pivot);
#endif
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = src[i];
    if (v < pivot) {
      dst[s.below++] = v;
    } else if (v > pivot) {
      dst[n - ++s.kept] = v;
    }
  }
  return s;
}

void value_range(const double* src, std::size_t n, double& lo, double& hi) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) {
    range_avx512(src, n, lo, hi);
    return;
  }
#endif
  const auto [mn, mx] = std::minmax_element(src, src + n);
  lo = *mn;
  hi = *mx;
}

// Bucket of each value: floor((v - lo) * scale), capped at `top`.
void bucket_pass(const double* src, std::size_t n, double lo, double scale, std::uint32_t top,
                 std::uint32_t* out) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) {
    bucket_avx512(src, n, lo, scale, top, out);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::min(static_cast<std::uint32_t>((src[i] - lo) * scale), top);
  }
}

void gather(const double* src, const std::uint32_t* bucket, std::size_t n, std::uint32_t a,
            std::uint32_t b, double* dst_a, double* dst_b) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) {
    gather_avx512(src, bucket, n, a, b, dst_a, dst_b);
    return;
  }
#endif
  std::size_t out_a = 0;
  std::size_t out_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bucket[i] == a) dst_a[out_a++] = src[i];
    if (a != b && bucket[i] == b) dst_b[out_b++] = src[i];
  }
}

double SmallRanks::pick(std::size_t want) const {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) return pick_avx512(*this, want);
#endif
  return pick_scalar(want);
}

void rank_small(const double* values, std::size_t n, SmallRanks& r) {
#ifdef FQN_AVX512_KERNEL
  if (use_avx512()) {
    rank_small_avx512(values, n, r);
    return;
  }
#endif
  std::fill(r.value, r.value + kSmall, kInf);
  std::copy(values, values + n, r.value);
  for (std::size_t i = 0; i < kSmall; ++i) {
    std::int64_t less = 0;
    std::int64_t upto = 0;
    for (std::size_t j = 0; j < kSmall; ++j) {
      less += r.value[j] < r.value[i];
      upto += r.value[j] <= r.value[i];
    }
    r.less[i] = less;
    r.upto[i] = upto;
  }
}

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

// Sample positions come from a fixed xorshift sequence, so worst-case inputs
// cannot be built from the data alone.
struct Sampler {
  std::uint64_t state;

  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  // Four positions in [0, n) per draw.
  static std::size_t at(std::uint64_t r, unsigned lane, std::size_t n) {
    return static_cast<std::size_t>((((r >> (16 * lane)) & 0xffffU) * n) >> 16);
  }

  double median_pivot(const double* v, std::size_t n) {
    const std::uint64_t r = next();
    return median3(v[at(r, 0, n)], v[at(r, 1, n)], v[at(r, 2, n)]);
  }

  void draw(const double* v, std::size_t n, SmallRanks& ranks) {
    std::array<double, kSample> sample;
    for (std::size_t i = 0; i < kSample; i += 4) {
      const std::uint64_t r = next();
      for (unsigned lane = 0; lane < 4; ++lane) sample[i + lane] = v[at(r, lane, n)];
    }
    rank_small(sample.data(), kSample, ranks);
  }
};

// Sample ranks of a target scatter by about two; bands are padded by three.
constexpr std::ptrdiff_t kPad = 3;

// Ranks are 0-based and relative to src[0, n); the two may coincide. The
// buffers swap roles after every pass.
RankPair select_ranks(double* src, double* dst, std::size_t n, std::size_t k_lo,
                      std::size_t k_hi, Sampler& rng) {
  bool sampled = true;
  while (n > kSmall) {
    double pivot = 0.0;
    if (sampled && n > 2 * kSample) {
      SmallRanks sample;
      rng.draw(src, n, sample);
      auto quantile = [&](std::ptrdiff_t r) {
        return r < 0 ? -kInf : r >= static_cast<std::ptrdiff_t>(kSample) ? kInf
                                                                         : sample.pick(r);
      };
      const auto r_lo = static_cast<std::ptrdiff_t>(k_lo * kSample / n);
      const auto r_hi = static_cast<std::ptrdiff_t>(k_hi * kSample / n);
      if (r_hi - r_lo <= kPad) {
        const Split s = band_pass(src, n, dst, quantile(r_lo - kPad), quantile(r_hi + kPad));
        if (s.below <= k_lo && k_hi < s.below + s.kept && s.kept < n) {
          k_lo -= s.below;
          k_hi -= s.below;
          n = s.kept;
          std::swap(src, dst);
          continue;
        }
        // The band missed (or caught everything); fall back to one pivot.
        sampled = false;
        continue;
      }
      // A sample value between the two ranks most likely parts them.
      pivot = sample.pick(static_cast<std::size_t>((r_lo + r_hi) / 2));
    } else {
      pivot = rng.median_pivot(src, n);
    }
    sampled = true;

    const Split s = pivot_pass(src, n, dst, pivot);
    const std::size_t mid_lo = s.below;
    const std::size_t mid_hi = n - s.kept;
    auto group = [&](std::size_t k) { return k < mid_lo ? 0 : k < mid_hi ? 1 : 2; };
    const int g_lo = group(k_lo);
    const int g_hi = group(k_hi);
    if (g_lo == 1 && g_hi == 1) return {pivot, pivot};
    if (g_lo == g_hi) {
      std::swap(src, dst);
      if (g_lo == 0) {
        n = mid_lo;
      } else {
        src += mid_hi;
        dst += mid_hi;
        k_lo -= mid_hi;
        k_hi -= mid_hi;
        n -= mid_hi;
      }
      continue;
    }
    // The ranks part ways; each group is finished in its own slice of the
    // buffers, so neither search disturbs the other.
    auto finish = [&](int g, std::size_t k) {
      if (g == 1) return pivot;
      if (g == 0) return select_ranks(dst, src, mid_lo, k, k, rng).hi;
      return select_ranks(dst + mid_hi, src + mid_hi, n - mid_hi, k - mid_hi, k - mid_hi, rng).hi;
    };
    const double lo = finish(g_lo, k_lo);
    return {lo, finish(g_hi, k_hi)};
  }
  SmallRanks tail;
  rank_small(src, n, tail);
  return {tail.pick(k_lo), tail.pick(k_hi)};
}

// Finishes ranks k_lo <= k_hi of src[0, n) using dst[0, n) as the second buffer.
RankPair finish(double* src, double* dst, std::size_t n, std::size_t k_lo, std::size_t k_hi,
                Sampler& rng) {
  if (n <= kSmall) {
    SmallRanks r;
    rank_small(src, n, r);
    return {r.pick(k_lo), r.pick(k_hi)};
  }
  return select_ranks(src, dst, n, k_lo, k_hi, rng);
}

constexpr std::size_t kMaxBuckets = 256;

// Spreads the values over equal-width buckets between their minimum and
// maximum, then searches only the bucket(s) holding the wanted ranks. Smooth
// data leaves a handful of values per bucket; piled-up values (ties) end up
// in the general search.
RankPair bucket_select(double* src, double* dst, std::uint32_t* bucket, std::size_t n,
                       std::size_t k_lo, std::size_t k_hi, Sampler& rng) {
  double lo = 0.0;
  double hi = 0.0;
  value_range(src, n, lo, hi);
  if (lo == hi) return {lo, lo};
  const std::size_t buckets = std::clamp<std::size_t>(n / 4, 4, kMaxBuckets);
  const double scale = static_cast<double>(buckets) / (hi - lo);
  if (!std::isfinite(scale)) return select_ranks(src, dst, n, k_lo, k_hi, rng);
  const auto top = static_cast<std::uint32_t>(buckets - 1);
  bucket_pass(src, n, lo, scale, top, bucket);

  std::array<std::uint32_t, kMaxBuckets> even{};
  std::array<std::uint32_t, kMaxBuckets> odd{};
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    ++even[bucket[i]];
    ++odd[bucket[i + 1]];
  }
  if (i < n) ++even[bucket[i]];

  // The wanted bucket is the last one starting at or before the rank.
  std::size_t start = 0;
  std::uint32_t b_lo = 0, b_hi = 0;
  std::size_t start_lo = 0, start_hi = 0;
  for (std::uint32_t b = 0; b < buckets; ++b) {
    const bool lo_here = start <= k_lo;
    const bool hi_here = start <= k_hi;
    b_lo = lo_here ? b : b_lo;
    start_lo = lo_here ? start : start_lo;
    b_hi = hi_here ? b : b_hi;
    start_hi = hi_here ? start : start_hi;
    start += even[b] + odd[b];
  }
  const std::size_t n_lo = even[b_lo] + odd[b_lo];
  const std::size_t n_hi = even[b_hi] + odd[b_hi];
  gather(src, bucket, n, b_lo, b_hi, dst, dst + n_lo);
  if (b_lo == b_hi) return finish(dst, src, n_lo, k_lo - start_lo, k_hi - start_lo, rng);
  const double v_lo = finish(dst, src, n_lo, k_lo - start_lo, k_lo - start_lo, rng).lo;
  return {v_lo, finish(dst + n_lo, src + n_lo, n_hi, k_hi - start_hi, k_hi - start_hi, rng).hi};
}

}  // namespace

double quickselect(std::span<double> values, std::uint64_t k) {
  SelectWorkspace work;
  return select_pair(values, k, k, work).hi;
}

RankPair select_pair(std::span<double> values, std::uint64_t lo_rank, std::uint64_t hi_rank,
                     SelectWorkspace& work) {
  if (lo_rank < 1 || lo_rank > hi_rank || hi_rank > values.size()) {
    raise(ErrorCode::kInvalidRank, "select: ranks " + std::to_string(lo_rank) + ", " +
                                       std::to_string(hi_rank) + " outside [1, " +
                                       std::to_string(values.size()) + "]");
  }
  const std::size_t n = values.size();
  if (work.values.size() < n) work.values.resize(n);
  if (work.buckets.size() < n) work.buckets.resize(n);
  Sampler rng{0x9e3779b97f4a7c15ULL ^ n};
  const auto k_lo = static_cast<std::size_t>(lo_rank - 1);
  const auto k_hi = static_cast<std::size_t>(hi_rank - 1);
  if (n <= kSmall) return select_ranks(values.data(), work.values.data(), n, k_lo, k_hi, rng);
  return bucket_select(values.data(), work.values.data(), work.buckets.data(), n, k_lo, k_hi, rng);
}

bool select_uses_avx512() noexcept { return use_avx512(); }

}  // namespace fqn
