#include "fqn/selection.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

#include "fqn/error.hpp"

using namespace fqn;

namespace {

enum class Shape { kNormal, kTies, kSkewed, kSpread, kSorted, kReversed };

std::vector<double> make(std::mt19937_64& rng, Shape shape, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (shape) {
      case Shape::kNormal: v[i] = normal(rng); break;
      case Shape::kTies: v[i] = static_cast<double>(rng() % 5); break;
      case Shape::kSkewed: v[i] = std::exp(6.0 * normal(rng)); break;
      // A few huge values squeeze everything else into one bucket.
      case Shape::kSpread: v[i] = rng() % 10 == 0 ? 1e300 : 1e-300 * normal(rng); break;
      case Shape::kSorted: v[i] = static_cast<double>(i); break;
      case Shape::kReversed: v[i] = static_cast<double>(n - i); break;
    }
  }
  return v;
}

void expect_matches_sort(std::mt19937_64& rng, Shape shape, std::size_t max_n, int reps) {
  SelectWorkspace work;
  for (int rep = 0; rep < reps; ++rep) {
    const std::size_t n = 1 + rng() % max_n;
    const auto v = make(rng, shape, n);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t lo = 1 + rng() % n;
    std::uint64_t hi = 1 + rng() % n;
    if (lo > hi) std::swap(lo, hi);
    auto scratch = v;
    const RankPair got = select_pair(scratch, lo, hi, work);
    ASSERT_EQ(got.lo, sorted[lo - 1]) << "n=" << n << " ranks " << lo << "," << hi;
    ASSERT_EQ(got.hi, sorted[hi - 1]) << "n=" << n << " ranks " << lo << "," << hi;
    scratch = v;
    ASSERT_EQ(quickselect(scratch, hi), sorted[hi - 1]);
  }
}

}  // namespace

TEST(Selection, KernelMatchesEnvironment) {
  if (std::getenv("FQN_DISABLE_AVX512") != nullptr) EXPECT_FALSE(select_uses_avx512());
}

TEST(Quickselect, Examples) {
  std::vector<double> a = {3, 1, 2};
  EXPECT_EQ(quickselect(a, 2), 2.0);
  std::vector<double> b = {7};
  EXPECT_EQ(quickselect(b, 1), 7.0);
  std::vector<double> c = {0, 0, 0};
  EXPECT_EQ(quickselect(c, 3), 0.0);
}

TEST(Quickselect, RankOutOfRange) {
  std::vector<double> a = {1, 2};
  try {
    quickselect(a, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidRank);
  }
  EXPECT_THROW(quickselect(a, 3), Error);
}

TEST(SelectPair, RejectsBadRanks) {
  SelectWorkspace work;
  std::vector<double> a = {1, 2, 3};
  EXPECT_THROW(select_pair(a, 3, 2, work), Error);
  EXPECT_THROW(select_pair(a, 0, 2, work), Error);
  EXPECT_THROW(select_pair(a, 1, 4, work), Error);
  std::vector<double> empty;
  EXPECT_THROW(select_pair(empty, 1, 1, work), Error);
}

TEST(SelectPair, SmallExamples) {
  SelectWorkspace work;
  std::vector<double> a = {5, -1, 3, 3, 9, 0};
  const RankPair r = select_pair(a, 2, 5, work);
  EXPECT_EQ(r.lo, 0.0);
  EXPECT_EQ(r.hi, 5.0);
}

TEST(SelectPair, AllEqual) {
  SelectWorkspace work;
  std::vector<double> a(1000, 2.5);
  const RankPair r = select_pair(a, 1, 1000, work);
  EXPECT_EQ(r.lo, 2.5);
  EXPECT_EQ(r.hi, 2.5);
}

TEST(SelectPair, InfinitiesAreOrdered) {
  const double inf = std::numeric_limits<double>::infinity();
  SelectWorkspace work;
  std::vector<double> a(100, 1.0);
  a[3] = -inf;
  a[50] = inf;
  a[70] = 0.0;
  auto b = a;
  const RankPair r = select_pair(b, 1, 100, work);
  EXPECT_EQ(r.lo, -inf);
  EXPECT_EQ(r.hi, inf);
  b = a;
  EXPECT_EQ(select_pair(b, 2, 99, work).lo, 0.0);
}

TEST(SelectPair, MatchesSortNormal) {
  std::mt19937_64 rng(11);
  expect_matches_sort(rng, Shape::kNormal, 40, 2000);
  expect_matches_sort(rng, Shape::kNormal, 3000, 300);
}

TEST(SelectPair, MatchesSortTies) {
  std::mt19937_64 rng(12);
  expect_matches_sort(rng, Shape::kTies, 40, 2000);
  expect_matches_sort(rng, Shape::kTies, 3000, 300);
}

TEST(SelectPair, MatchesSortSkewed) {
  std::mt19937_64 rng(13);
  expect_matches_sort(rng, Shape::kSkewed, 3000, 300);
  expect_matches_sort(rng, Shape::kSpread, 3000, 300);
}

TEST(SelectPair, MatchesSortOrderedInput) {
  std::mt19937_64 rng(14);
  expect_matches_sort(rng, Shape::kSorted, 3000, 200);
  expect_matches_sort(rng, Shape::kReversed, 3000, 200);
}

TEST(SelectPair, EveryRankOfOneVector) {
  std::mt19937_64 rng(15);
  const auto v = make(rng, Shape::kNormal, 257);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  SelectWorkspace work;
  for (std::uint64_t k = 1; k <= v.size(); ++k) {
    auto scratch = v;
    ASSERT_EQ(select_pair(scratch, k, k, work).hi, sorted[k - 1]);
  }
}
