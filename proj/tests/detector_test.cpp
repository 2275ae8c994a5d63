#include "fqn/detector.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "fqn/datagen.hpp"
#include "fqn/error.hpp"
#include "oracle.hpp"

using namespace fqn;

namespace {

QnConfig unit(std::size_t w, double t = 3.0) { return {w, t, DnMode::kUnit}; }

}  // namespace

TEST(Detector, FirstTestIndex) {
  Detector big(QnConfig{500, 3.0, DnMode::kFiniteSample});
  EXPECT_EQ(big.next_test_index(), 501u);

  Detector d(unit(1));
  EXPECT_EQ(d.next_test_index(), 2u);
  EXPECT_FALSE(d.step(1.0));
  EXPECT_FALSE(d.step(2.0));
  const auto v = d.step(3.0);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->index, 2u);
  EXPECT_EQ(d.next_test_index(), 3u);
}

TEST(Detector, InvalidConfig) {
  for (const QnConfig& c : {unit(1, 0.0), unit(0), unit(1, -2.0)}) {
    try {
      Detector d(c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    }
  }
}

TEST(Detector, HandTraceOutlier) {
  Detector d(unit(1));
  EXPECT_FALSE(d.step(0.0));
  EXPECT_FALSE(d.step(100.0));
  const auto v = d.step(1.0);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->index, 2u);
  EXPECT_EQ(v->value, 100.0);
  EXPECT_EQ(v->median, 1.0);
  EXPECT_EQ(v->qn, 2.2219);
  EXPECT_EQ(v->score, 99.0);
  EXPECT_TRUE(v->is_outlier);
}

TEST(Detector, HandTraceInlier) {
  Detector d(unit(1));
  d.step(0.0);
  d.step(1.0);
  const auto v = d.step(2.0);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->value, 1.0);
  EXPECT_EQ(v->median, 1.0);
  EXPECT_EQ(v->qn, 2.2219);
  EXPECT_EQ(v->score, 0.0);
  EXPECT_FALSE(v->is_outlier);
}

TEST(Detector, StrictThreshold) {
  // Score exactly t*qn is an inlier.
  const Verdict at = make_verdict(1, 2.0, 0.0, 1.0, 2.0);
  EXPECT_FALSE(at.is_outlier);
  const Verdict above = make_verdict(1, 2.0 + 1e-12, 0.0, 1.0, 2.0);
  EXPECT_TRUE(above.is_outlier);
}

TEST(Detector, ZeroQnFlagsAnyDeviation) {
  // Window {5,5,6,5,5}: stat = 0, the center 6 deviates from the median 5.
  Detector d(unit(2));
  for (const double v : {5.0, 5.0, 6.0, 5.0}) EXPECT_FALSE(d.step(v));
  const auto v = d.step(5.0);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->qn, 0.0);
  EXPECT_TRUE(v->is_outlier);
}

TEST(Detector, RejectedSampleLeavesStateUnchanged) {
  Detector d(unit(1));
  d.step(1.0);
  EXPECT_THROW(d.step(std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_EQ(d.next_index(), 2u);
  EXPECT_EQ(d.window().count(), 1u);
  d.step(2.0);
  const auto v = d.step(3.0);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->index, 2u);
  EXPECT_EQ(v->value, 2.0);
}

TEST(Detector, RequiresConsecutiveIndices) {
  Detector d(unit(1));
  d.step(Sample{1, 1.0});
  EXPECT_THROW(d.step(Sample{3, 1.0}), Error);
  EXPECT_NO_THROW(d.step(Sample{2, 1.0}));
}

TEST(DetectAll, CountsAndWarmup) {
  const std::vector<double> constant(50, 2.5);
  const auto verdicts = detect_all(constant, unit(3));
  EXPECT_EQ(verdicts.size(), 50u - 6u);
  for (const auto& v : verdicts) EXPECT_FALSE(v.is_outlier);

  const std::vector<double> short_stream(6, 1.0);
  EXPECT_TRUE(detect_all(short_stream, unit(3)).empty());
  EXPECT_TRUE(detect_all({}, unit(3)).empty());
}

TEST(DetectAll, PaperProtocolLength) {
  const std::size_t w = 10;
  const auto stream = generate(DistSpec::table_default(Distribution::kNormal, 1), 100000 + 2 * w + 1);
  const auto verdicts = detect_all(stream, unit(w));
  // 100001 full windows; the harness discards the first.
  EXPECT_EQ(verdicts.size(), 100001u);
  EXPECT_EQ(verdicts.front().index, w + 1);
  EXPECT_EQ(verdicts.back().index, stream.size() - w);
}

// Every distribution, against per-window re-sorting and brute-force Qn.
TEST(DetectAll, MatchesReference) {
  for (const Distribution d : kAllDistributions) {
    for (const std::size_t w : {1u, 4u, 13u}) {
      DistSpec spec = DistSpec::table_default(d, 100 + w);
      spec.contamination = {0.05, 50.0};
      const auto stream = generate(spec, 1500);
      for (const DnMode mode : {DnMode::kUnit, DnMode::kFiniteSample}) {
        const QnConfig cfg{w, 3.0, mode};
        const auto fast = detect_all(stream, cfg);
        const auto ref = detect_all_reference(stream, cfg);
        ASSERT_EQ(fast.size(), ref.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
          ASSERT_EQ(fast[i].index, ref[i].index);
          ASSERT_EQ(fast[i].value, ref[i].value);
          ASSERT_EQ(fast[i].median, ref[i].median);
          ASSERT_TRUE(oracle::rel_close(fast[i].qn, ref[i].qn, 1e-12));
          ASSERT_EQ(fast[i].is_outlier, ref[i].is_outlier) << name(d) << " i=" << i;
        }
      }
    }
  }
}

TEST(DetectAll, ThresholdMonotone) {
  std::mt19937_64 rng(17);
  for (const Distribution d : kAllDistributions) {
    const auto stream = generate(DistSpec::table_default(d, rng()), 3000);
    const auto t3 = detect_all(stream, {7, 3.0, DnMode::kFiniteSample});
    const auto t4 = detect_all(stream, {7, 4.0, DnMode::kFiniteSample});
    ASSERT_EQ(t3.size(), t4.size());
    for (std::size_t i = 0; i < t3.size(); ++i) {
      if (t4[i].is_outlier) ASSERT_TRUE(t3[i].is_outlier);
    }
  }
}

// x -> a*x + b with small-integer data, so the transform is exact and no
// verdict can sit on the threshold by rounding.
TEST(DetectAll, AffineInvariance) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> base(-20, 20);
  std::bernoulli_distribution spike(0.05);
  std::vector<double> stream(4000);
  for (double& v : stream) v = base(rng) + (spike(rng) ? 400 : 0);
  const QnConfig cfg{9, 3.0, DnMode::kUnit};
  const auto ref = detect_all(stream, cfg);
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{-2, 5}, {0.5, -3}, {8, 1024}}) {
    std::vector<double> y = stream;
    for (double& v : y) v = a * v + b;
    const auto got = detect_all(y, cfg);
    ASSERT_EQ(got.size(), ref.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].is_outlier, ref[i].is_outlier);
      ASSERT_TRUE(oracle::rel_close(got[i].qn, std::fabs(a) * ref[i].qn, 1e-12));
    }
  }
}
