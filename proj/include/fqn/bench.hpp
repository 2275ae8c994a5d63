#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fqn/datagen.hpp"
#include "fqn/qn.hpp"

namespace fqn {

enum class Algorithm {
  kFast,   // Detector
  kNaive,  // ReferenceDetector
};

struct BenchConfig {
  std::vector<std::size_t> w_values = {100, 200, 300, 400, 500};
  std::uint64_t tested_items = 100000;
  unsigned runs = 3;
  std::vector<Distribution> distributions{kAllDistributions.begin(), kAllDistributions.end()};
  std::uint64_t seed = 20190101;
  double t = 3.0;
  DnMode dn_mode = DnMode::kFiniteSample;
  Algorithm algorithm = Algorithm::kFast;
  unsigned jobs = 1;  // concurrently timed cells, capped at the core count

  void validate() const;
  // Items needed so that exactly tested_items updates follow the first full window.
  static std::uint64_t stream_length(std::size_t w, std::uint64_t tested_items) {
    return tested_items + 2 * static_cast<std::uint64_t>(w) + 1;
  }
};

struct BenchRow {
  Distribution distribution = Distribution::kNormal;
  std::size_t w = 0;
  unsigned run = 0;  // 1-based
  double updates_per_sec = 0.0;
  // Not serialized.
  std::uint64_t stream_length = 0;
  std::uint64_t timed_updates = 0;
  std::uint64_t outliers = 0;
};

struct BenchAggregate {
  Distribution distribution = Distribution::kNormal;
  std::size_t w = 0;
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * sample stddev / sqrt(runs); 0 for a single run
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> aggregates;

  const BenchAggregate* find(Distribution d, std::size_t w) const;
};

// Seed of the workload for one (distribution, w, run) cell.
std::uint64_t cell_seed(std::uint64_t base, Distribution d, std::size_t w, unsigned run);

// Generates the cell's stream, warms the window up with its first 2w+1 items
// (the first full window's verdict is discarded) and times the remaining
// tested_items updates on a monotonic clock.
BenchRow run_cell(const BenchConfig& config, Distribution d, std::size_t w, unsigned run);

using BenchProgress = std::function<void(const BenchRow&)>;
BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress = {});

// Per-(distribution, w) mean and confidence half-width, in first-seen order.
std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows);

std::string to_csv(const BenchReport& report);
BenchReport parse_bench_csv(std::string_view text);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace fqn
