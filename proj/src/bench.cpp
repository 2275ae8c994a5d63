#include "fqn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "fqn/detector.hpp"
#include "fqn/error.hpp"

namespace fqn {

namespace {

constexpr std::string_view kRowHeader = "distribution,w,run,updates_per_sec";
constexpr std::string_view kAggregateHeader = "distribution,w,mean,ci95";

template <class DetectorT>
BenchRow time_updates(const BenchConfig& config, std::span<const double> stream, std::size_t w) {
  QnConfig qn{w, config.t, config.dn_mode};
  DetectorT detector(qn);
  const std::size_t warmup = 2 * w + 1;
  for (std::size_t i = 0; i < warmup; ++i) detector.step(stream[i]);

  std::uint64_t outliers = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = warmup; i < stream.size(); ++i) {
    if (auto v = detector.step(stream[i]); v && v->is_outlier) ++outliers;
  }
  const auto stop = std::chrono::steady_clock::now();

  const double secs = std::chrono::duration<double>(stop - start).count();
  BenchRow row;
  row.w = w;
  row.stream_length = stream.size();
  row.timed_updates = stream.size() - warmup;
  row.outliers = outliers;
  // A clock tick of zero would make the rate infinite; clamp to one nanosecond.
  row.updates_per_sec = static_cast<double>(row.timed_updates) / std::max(secs, 1e-9);
  return row;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    raise(ErrorCode::kIo, "bench csv line " + std::to_string(line_no) + ": bad number '" +
                              std::string(field) + "'");
  }
  return value;
}

Distribution parse_distribution(std::string_view field, std::size_t line_no) {
  const auto d = distribution_from_name(field);
  if (!d) {
    raise(ErrorCode::kIo, "bench csv line " + std::to_string(line_no) +
                              ": unknown distribution '" + std::string(field) + "'");
  }
  return *d;
}

}  // namespace

void BenchConfig::validate() const {
  if (runs == 0) raise(ErrorCode::kInvalidParameter, "bench: runs must be >= 1");
  if (tested_items == 0) raise(ErrorCode::kInvalidParameter, "bench: tested_items must be >= 1");
  if (w_values.empty()) raise(ErrorCode::kInvalidParameter, "bench: no w values");
  if (distributions.empty()) raise(ErrorCode::kInvalidParameter, "bench: no distributions");
  if (jobs == 0) raise(ErrorCode::kInvalidParameter, "bench: jobs must be >= 1");
  for (const std::size_t w : w_values) QnConfig{w, t, dn_mode}.validate();
}

const BenchAggregate* BenchReport::find(Distribution d, std::size_t w) const {
  for (const auto& a : aggregates) {
    if (a.distribution == d && a.w == w) return &a;
  }
  return nullptr;
}

std::uint64_t cell_seed(std::uint64_t base, Distribution d, std::size_t w, unsigned run) {
  std::uint64_t s = mix_seed(base, static_cast<std::uint64_t>(d));
  s = mix_seed(s, w);
  return mix_seed(s, run);
}

BenchRow run_cell(const BenchConfig& config, Distribution d, std::size_t w, unsigned run) {
  const DistSpec spec = DistSpec::table_default(d, cell_seed(config.seed, d, w, run));
  const std::vector<double> stream =
      generate(spec, BenchConfig::stream_length(w, config.tested_items));
  BenchRow row = config.algorithm == Algorithm::kFast
                     ? time_updates<Detector>(config, stream, w)
                     : time_updates<ReferenceDetector>(config, stream, w);
  row.distribution = d;
  row.run = run;
  return row;
}

BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress) {
  config.validate();

  struct Cell {
    Distribution d;
    std::size_t w;
    unsigned run;
  };
  std::vector<Cell> cells;
  for (const Distribution d : config.distributions)
    for (const std::size_t w : config.w_values)
      for (unsigned run = 1; run <= config.runs; ++run) cells.push_back({d, w, run});

  // Cells execute round by round (every first run, then every second run,
  // ...) so slow spells of the machine spread across distributions rather
  // than landing on one. Rows keep the distribution-major order.
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cells[a].run < cells[b].run; });

  BenchReport report;
  report.rows.resize(cells.size());

  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = std::min<unsigned>({config.jobs, cores, static_cast<unsigned>(cells.size())});
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t n = next++; n < cells.size(); n = next++) {
      const std::size_t i = order[n];
      report.rows[i] = run_cell(config, cells[i].d, cells[i].w, cells[i].run);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(report.rows[i]);
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  report.aggregates = aggregate(report.rows);
  return report;
}

std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::vector<BenchAggregate> out;
  std::vector<std::vector<double>> samples;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchAggregate& a) {
      return a.distribution == row.distribution && a.w == row.w;
    });
    if (it == out.end()) {
      out.push_back({row.distribution, row.w, 0.0, 0.0});
      samples.emplace_back();
      it = out.end() - 1;
    }
    samples[static_cast<std::size_t>(it - out.begin())].push_back(row.updates_per_sec);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = samples[i];
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (const double x : xs) sum += x;
    const double mean = sum / n;
    double ci = 0.0;
    if (xs.size() > 1) {
      double ss = 0.0;
      for (const double x : xs) ss += (x - mean) * (x - mean);
      ci = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    out[i].mean = mean;
    out[i].ci95 = ci;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "# updates_per_sec = timed updates / wall seconds of the steady-state loop"
        " (warm-up excluded)\n";
  os << "# ci95 = 1.96 * sample stddev / sqrt(runs) (normal approximation)\n";
  os << kRowHeader << '\n';
  for (const auto& r : report.rows) {
    os << name(r.distribution) << ',' << r.w << ',' << r.run << ','
       << format_double(r.updates_per_sec) << '\n';
  }
  os << kAggregateHeader << '\n';
  for (const auto& a : report.aggregates) {
    os << name(a.distribution) << ',' << a.w << ',' << format_double(a.mean) << ','
       << format_double(a.ci95) << '\n';
  }
  return os.str();
}

BenchReport parse_bench_csv(std::string_view text) {
  enum class Section { kNone, kRows, kAggregates } section = Section::kNone;
  BenchReport report;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (line == kRowHeader) {
      section = Section::kRows;
      continue;
    }
    if (line == kAggregateHeader) {
      section = Section::kAggregates;
      continue;
    }
    const auto f = split(line, ',');
    if (section == Section::kNone || f.size() != 4) {
      raise(ErrorCode::kIo, "bench csv line " + std::to_string(line_no) + ": unexpected record");
    }
    if (section == Section::kRows) {
      BenchRow r;
      r.distribution = parse_distribution(f[0], line_no);
      r.w = parse_number<std::size_t>(f[1], line_no);
      r.run = parse_number<unsigned>(f[2], line_no);
      r.updates_per_sec = parse_number<double>(f[3], line_no);
      report.rows.push_back(r);
    } else {
      BenchAggregate a;
      a.distribution = parse_distribution(f[0], line_no);
      a.w = parse_number<std::size_t>(f[1], line_no);
      a.mean = parse_number<double>(f[2], line_no);
      a.ci95 = parse_number<double>(f[3], line_no);
      report.aggregates.push_back(a);
    }
  }
  return report;
}

}  // namespace fqn
