// fqn: command-line front end over the libfqn C API.
//
//   fqn detect --w 50 [--t 3] [--dn-mode finite_sample|unit] [--format csv|jsonl]
//              [--outliers-only] [--input FILE]
//   fqn gen    --dist normal --n 1000 [--seed 1] [--param mu=0] ...
//   fqn qn     [--input FILE] [--dn-mode ...] [--fast]
//   fqn bench  [--dist all] [--w 100,200,300,400,500] [--tested-items 100000]
//              [--runs 3] [--algorithm fast|naive] [--jobs 1] [--output FILE]
//
// Exit codes: 0 success, 1 usage or I/O error, 2 malformed input line.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "fqn/fqn.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitMalformed = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedLine : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(fqn_status status) {
  if (status != FQN_OK) {
    throw UsageError(std::string(fqn_status_string(status)) + ": " + fqn_last_error());
  }
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

const std::map<std::string, fqn_dn_mode> kDnModes = {{"unit", FQN_DN_UNIT},
                                                     {"finite_sample", FQN_DN_FINITE_SAMPLE}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Reads one decimal literal per line. Blank lines are skipped; non-finite
// values are reported and skipped; anything else stops with MalformedLine.
class ValueReader {
 public:
  explicit ValueReader(const std::string& path) {
    if (path == "-") {
      in_ = &std::cin;
    } else {
      file_.open(path);
      if (!file_) throw UsageError("cannot open input '" + path + "'");
      in_ = &file_;
    }
  }

  std::optional<double> next() {
    std::string line;
    while (std::getline(*in_, line)) {
      ++line_no_;
      std::string_view text = trim(line);
      if (text.empty()) continue;
      if (text.front() == '+') text.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw MalformedLine("line " + std::to_string(line_no_) + ": malformed value '" +
                            std::string(trim(line)) + "'");
      }
      if (!std::isfinite(v)) {
        std::cerr << "warning: line " << line_no_ << ": non-finite value skipped\n";
        continue;
      }
      return v;
    }
    if (in_->bad()) throw UsageError("read error on input");
    return std::nullopt;
  }

 private:
  std::istream* in_ = nullptr;
  std::ifstream file_;
  std::size_t line_no_ = 0;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ostream* out_ = &std::cout;
  std::ofstream file_;
};

struct DetectOptions {
  std::uint64_t w = 0;
  double t = 3.0;
  fqn_dn_mode dn_mode = FQN_DN_FINITE_SAMPLE;
  std::string format = "csv";
  bool outliers_only = false;
  std::string input = "-";
};

int run_detect(const DetectOptions& opt) {
  fqn_config config{opt.w, opt.t, opt.dn_mode};
  fqn_detector* raw = nullptr;
  check(fqn_detector_create(&config, &raw));
  std::unique_ptr<fqn_detector, decltype(&fqn_detector_destroy)> detector(raw, fqn_detector_destroy);

  ValueReader reader(opt.input);
  const bool jsonl = opt.format == "jsonl";
  std::ostream& out = std::cout;
  if (!jsonl) out << "index,value,median,qn,score,is_outlier\n";
  while (const auto value = reader.next()) {
    fqn_verdict v{};
    int has = 0;
    check(fqn_detector_push(detector.get(), *value, &v, &has));
    if (!has || (opt.outliers_only && !v.is_outlier)) continue;
    if (jsonl) {
      out << "{\"index\":" << v.index << ",\"value\":" << fmt(v.value)
          << ",\"median\":" << fmt(v.median) << ",\"qn\":" << fmt(v.qn)
          << ",\"score\":" << fmt(v.score)
          << ",\"is_outlier\":" << (v.is_outlier ? "true" : "false") << "}\n";
    } else {
      out << v.index << ',' << fmt(v.value) << ',' << fmt(v.median) << ',' << fmt(v.qn) << ','
          << fmt(v.score) << ',' << v.is_outlier << '\n';
    }
  }
  return 0;
}

struct GenOptions {
  std::string dist;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> params;
  double contamination_rate = 0.0;
  double contamination_magnitude = 0.0;
  std::string output = "-";
};

int run_gen(const GenOptions& opt) {
  fqn_distribution kind{};
  check(fqn_distribution_from_name(opt.dist.c_str(), &kind));
  fqn_dist_spec spec{};
  check(fqn_dist_spec_default(kind, opt.seed, &spec));
  for (const std::string& p : opt.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects name=value, got '" + p + "'");
    double value = 0.0;
    const std::string_view text(p.data() + eq + 1, p.size() - eq - 1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw UsageError("--param: bad number in '" + p + "'");
    }
    check(fqn_dist_spec_set_param(&spec, p.substr(0, eq).c_str(), value));
  }
  spec.contamination_rate = opt.contamination_rate;
  spec.contamination_magnitude = opt.contamination_magnitude;

  fqn_generator* raw = nullptr;
  check(fqn_generator_create(&spec, &raw));
  std::unique_ptr<fqn_generator, decltype(&fqn_generator_destroy)> gen(raw, fqn_generator_destroy);

  Output output(opt.output);
  std::ostream& out = output.stream();
  std::vector<double> chunk(4096);
  for (std::uint64_t left = opt.n; left > 0;) {
    const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(left, chunk.size()));
    check(fqn_generator_fill(gen.get(), chunk.data(), take));
    for (std::size_t i = 0; i < take; ++i) out << fmt(chunk[i]) << '\n';
    left -= take;
  }
  out.flush();
  if (!out) throw UsageError("write error");
  return 0;
}

struct QnOptions {
  std::string input = "-";
  fqn_dn_mode dn_mode = FQN_DN_FINITE_SAMPLE;
  bool fast = false;
};

int run_qn(const QnOptions& opt) {
  ValueReader reader(opt.input);
  std::vector<double> values;
  while (const auto v = reader.next()) values.push_back(*v);
  if (values.size() < 2) throw UsageError("qn needs at least 2 values");
  // Matrix selection for odd sizes when asked; brute force otherwise.
  const int fast = opt.fast && values.size() % 2 == 1;
  fqn_qn_value q{};
  check(fqn_qn_compute(values.data(), values.size(), opt.dn_mode, fast, &q));
  std::cout << "n,stat,qn\n" << values.size() << ',' << fmt(q.stat) << ',' << fmt(q.qn) << '\n';
  return 0;
}

struct BenchOptions {
  std::vector<std::string> dists = {"all"};
  std::vector<std::uint64_t> w_values = {100, 200, 300, 400, 500};
  std::uint64_t tested_items = 100000;
  std::uint32_t runs = 3;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double t = 3.0;
  fqn_dn_mode dn_mode = FQN_DN_FINITE_SAMPLE;
  std::string algorithm = "fast";
  std::uint32_t jobs = 1;
  std::string output = "-";
  bool quiet = false;
};

void report_progress(const fqn_bench_row* row, void*) {
  std::cerr << fqn_distribution_name(row->distribution) << " w=" << row->w << " run=" << row->run
            << ": " << fmt(std::round(row->updates_per_sec)) << " updates/s\n";
}

int run_bench(const BenchOptions& opt) {
  std::vector<fqn_distribution> dists;
  for (const std::string& d : opt.dists) {
    if (d == "all") {
      for (int k = 0; k < FQN_DIST_COUNT; ++k) dists.push_back(static_cast<fqn_distribution>(k));
      continue;
    }
    fqn_distribution kind{};
    check(fqn_distribution_from_name(d.c_str(), &kind));
    dists.push_back(kind);
  }

  fqn_bench_config config = fqn_bench_config_default();
  config.w_values = opt.w_values.data();
  config.w_count = opt.w_values.size();
  config.distributions = dists.data();
  config.distribution_count = dists.size();
  config.tested_items = opt.tested_items;
  config.runs = opt.runs;
  if (opt.seed_set) config.seed = opt.seed;
  config.t = opt.t;
  config.dn_mode = opt.dn_mode;
  config.algorithm = opt.algorithm == "naive" ? FQN_ALGO_NAIVE : FQN_ALGO_FAST;
  config.jobs = opt.jobs;

  fqn_bench_report* raw = nullptr;
  check(fqn_bench_run(&config, opt.quiet ? nullptr : report_progress, nullptr, &raw));
  std::unique_ptr<fqn_bench_report, decltype(&fqn_bench_report_destroy)> report(
      raw, fqn_bench_report_destroy);

  std::size_t needed = 0;
  fqn_bench_report_csv(report.get(), nullptr, 0, &needed);
  std::string csv(needed, '\0');
  check(fqn_bench_report_csv(report.get(), csv.data(), csv.size(), &needed));
  csv.pop_back();

  Output output(opt.output);
  output.stream() << csv;
  output.stream().flush();
  if (!output.stream()) throw UsageError("write error");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming outlier detection with the Qn scale estimator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fqn_version()));

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "Flag outliers in a stream of values");
  detect_cmd->add_option("--w", detect.w, "Semi-window size (window = 2w+1)")->required();
  detect_cmd->add_option("--t", detect.t, "Outlier multiplier");
  detect_cmd->add_option("--dn-mode", detect.dn_mode, "d_n correction")
      ->transform(CLI::CheckedTransformer(kDnModes, CLI::ignore_case));
  detect_cmd->add_option("--format", detect.format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  detect_cmd->add_flag("--outliers-only", detect.outliers_only, "Emit outlier rows only");
  detect_cmd->add_option("--input", detect.input, "Input file, '-' for stdin");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic stream");
  gen_cmd->add_option("--dist", gen.dist, "Distribution name")->required();
  gen_cmd->add_option("--n", gen.n, "Number of values")->required();
  gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
  gen_cmd->add_option("--param", gen.params, "Override a parameter, name=value");
  gen_cmd->add_option("--contamination-rate", gen.contamination_rate,
                      "Fraction of items shifted by the contamination magnitude");
  gen_cmd->add_option("--contamination-magnitude", gen.contamination_magnitude);
  gen_cmd->add_option("--output", gen.output, "Output file, '-' for stdout");

  QnOptions qn;
  auto* qn_cmd = app.add_subcommand("qn", "Qn of a finite list of values");
  qn_cmd->add_option("--input", qn.input, "Input file, '-' for stdin");
  qn_cmd->add_option("--dn-mode", qn.dn_mode, "d_n correction")
      ->transform(CLI::CheckedTransformer(kDnModes, CLI::ignore_case));
  qn_cmd->add_flag("--fast", qn.fast, "Use linear-time matrix selection (odd sizes)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Throughput experiment, CSV report");
  bench_cmd->add_option("--dist", bench.dists, "Distributions, or 'all'")->delimiter(',');
  bench_cmd->add_option("--w", bench.w_values, "Semi-window sizes")->delimiter(',');
  bench_cmd->add_option("--tested-items", bench.tested_items, "Timed updates per run");
  bench_cmd->add_option("--runs", bench.runs, "Runs per (distribution, w)");
  bench_cmd->add_option("--seed", bench.seed, "Workload seed");
  bench_cmd->add_option("--t", bench.t, "Outlier multiplier");
  bench_cmd->add_option("--dn-mode", bench.dn_mode, "d_n correction")
      ->transform(CLI::CheckedTransformer(kDnModes, CLI::ignore_case));
  bench_cmd->add_option("--algorithm", bench.algorithm, "fast or naive")
      ->check(CLI::IsMember({"fast", "naive"}));
  bench_cmd->add_option("--jobs", bench.jobs, "Cells timed concurrently (capped at cores)");
  bench_cmd->add_option("--output", bench.output, "Output file, '-' for stdout");
  bench_cmd->add_flag("--quiet", bench.quiet, "No progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  bench.seed_set = bench_cmd->count("--seed") > 0;

  try {
    if (*detect_cmd) return run_detect(detect);
    if (*gen_cmd) return run_gen(gen);
    if (*qn_cmd) return run_qn(qn);
    if (*bench_cmd) return run_bench(bench);
  } catch (const MalformedLine& e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
