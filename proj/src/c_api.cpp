#include "fqn/fqn.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "fqn/bench.hpp"
#include "fqn/datagen.hpp"
#include "fqn/detector.hpp"
#include "fqn/error.hpp"
#include "fqn/qn.hpp"

struct fqn_detector {
  fqn::Detector impl;
};

struct fqn_generator {
  fqn::Generator impl;
};

struct fqn_bench_report {
  fqn::BenchReport impl;
};

namespace {

thread_local std::string last_error;

fqn_status fail(fqn_status status, const char* what) {
  last_error = what;
  return status;
}

fqn_status from_code(fqn::ErrorCode code) {
  switch (code) {
    case fqn::ErrorCode::kInvalidParameter: return FQN_ERR_INVALID_PARAMETER;
    case fqn::ErrorCode::kRejectedSample: return FQN_ERR_REJECTED_SAMPLE;
    case fqn::ErrorCode::kNotReady: return FQN_ERR_NOT_READY;
    case fqn::ErrorCode::kInvalidRank: return FQN_ERR_INVALID_RANK;
    case fqn::ErrorCode::kInternal: return FQN_ERR_INTERNAL;
    case fqn::ErrorCode::kIo: return FQN_ERR_IO;
  }
  return FQN_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
fqn_status guarded(F&& body) {
  try {
    body();
    return FQN_OK;
  } catch (const fqn::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FQN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FQN_ERR_INTERNAL, e.what());
  }
}

fqn::DnMode to_mode(fqn_dn_mode mode) {
  switch (mode) {
    case FQN_DN_UNIT: return fqn::DnMode::kUnit;
    case FQN_DN_FINITE_SAMPLE: return fqn::DnMode::kFiniteSample;
  }
  fqn::raise(fqn::ErrorCode::kInvalidParameter, "unknown d_n mode");
}

fqn::Distribution to_distribution(fqn_distribution kind) {
  if (kind < 0 || kind >= FQN_DIST_COUNT) {
    fqn::raise(fqn::ErrorCode::kInvalidParameter, "unknown distribution");
  }
  return static_cast<fqn::Distribution>(kind);
}

fqn::QnConfig to_config(const fqn_config& c) {
  return {static_cast<std::size_t>(c.w), c.t, to_mode(c.dn_mode)};
}

fqn::DistSpec to_spec(const fqn_dist_spec& s) {
  fqn::DistSpec spec;
  spec.kind = to_distribution(s.kind);
  spec.params = {s.params[0], s.params[1]};
  spec.seed = s.seed;
  spec.contamination = {s.contamination_rate, s.contamination_magnitude};
  return spec;
}

fqn_dist_spec from_spec(const fqn::DistSpec& spec) {
  fqn_dist_spec out{};
  out.kind = static_cast<fqn_distribution>(spec.kind);
  out.params[0] = spec.params[0];
  out.params[1] = spec.params[1];
  out.seed = spec.seed;
  out.contamination_rate = spec.contamination.rate;
  out.contamination_magnitude = spec.contamination.magnitude;
  return out;
}

void fill_verdict(const fqn::Verdict& v, fqn_verdict* out) {
  out->index = v.index;
  out->value = v.value;
  out->median = v.median;
  out->qn = v.qn;
  out->score = v.score;
  out->is_outlier = v.is_outlier ? 1 : 0;
}

fqn_bench_row to_row(const fqn::BenchRow& r) {
  return {static_cast<fqn_distribution>(r.distribution), r.w, r.run, r.updates_per_sec,
          r.stream_length};
}

}  // namespace

extern "C" {

const char* fqn_version(void) { return "1.0.0"; }

const char* fqn_status_string(fqn_status status) {
  switch (status) {
    case FQN_OK: return "ok";
    case FQN_ERR_NULL_ARGUMENT: return "null argument";
    case FQN_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    default: break;
  }
  if (status >= FQN_ERR_INVALID_PARAMETER && status <= FQN_ERR_IO) {
    return fqn::to_string(static_cast<fqn::ErrorCode>(status));
  }
  return "unknown status";
}

const char* fqn_last_error(void) { return last_error.c_str(); }

fqn_config fqn_config_default(uint64_t w) { return {w, 3.0, FQN_DN_FINITE_SAMPLE}; }

fqn_status fqn_detector_create(const fqn_config* config, fqn_detector** out) {
  if (!config || !out) return fail(FQN_ERR_NULL_ARGUMENT, "fqn_detector_create: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fqn_detector{fqn::Detector(to_config(*config))}; });
}

void fqn_detector_destroy(fqn_detector* detector) { delete detector; }

fqn_status fqn_detector_push(fqn_detector* detector, double value, fqn_verdict* verdict,
                             int* has_verdict) {
  if (!detector || !verdict || !has_verdict) {
    return fail(FQN_ERR_NULL_ARGUMENT, "fqn_detector_push: null argument");
  }
  *has_verdict = 0;
  return guarded([&] {
    if (auto v = detector->impl.step(value)) {
      fill_verdict(*v, verdict);
      *has_verdict = 1;
    }
  });
}

fqn_status fqn_detector_window_median(const fqn_detector* detector, double* out) {
  if (!detector || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] { *out = detector->impl.window().median(); });
}

uint64_t fqn_detector_next_test_index(const fqn_detector* detector) {
  return detector ? detector->impl.next_test_index() : 0;
}

fqn_status fqn_qn_compute(const double* values, size_t n, fqn_dn_mode mode, int fast,
                          fqn_qn_value* out) {
  if ((!values && n > 0) || !out) return fail(FQN_ERR_NULL_ARGUMENT, "fqn_qn_compute: null argument");
  return guarded([&] {
    const std::span<const double> input(values, n);
    for (const double v : input) {
      if (!std::isfinite(v)) fqn::raise(fqn::ErrorCode::kRejectedSample, "non-finite value");
    }
    fqn::QnValue q;
    if (fast) {
      std::vector<double> sorted(input.begin(), input.end());
      std::sort(sorted.begin(), sorted.end());
      q = fqn::qn_from_sorted(sorted, to_mode(mode));
    } else {
      q = fqn::qn_bruteforce(input, to_mode(mode));
    }
    *out = {q.stat, q.qn};
  });
}

fqn_status fqn_qn_rank(uint64_t s, uint64_t* out) {
  if (!out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] { *out = fqn::qn_rank(s); });
}

fqn_status fqn_dn_factor(uint64_t s, fqn_dn_mode mode, double* out) {
  if (!out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] { *out = fqn::dn_factor(s, to_mode(mode)); });
}

const char* fqn_distribution_name(fqn_distribution kind) {
  if (kind < 0 || kind >= FQN_DIST_COUNT) return nullptr;
  // Names are string literals, so the view is NUL-terminated.
  return fqn::name(static_cast<fqn::Distribution>(kind)).data();
}

fqn_status fqn_distribution_from_name(const char* name, fqn_distribution* out) {
  if (!name || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  const auto d = fqn::distribution_from_name(name);
  if (!d) return fail(FQN_ERR_INVALID_PARAMETER, "unknown distribution name");
  *out = static_cast<fqn_distribution>(*d);
  return FQN_OK;
}

fqn_status fqn_dist_spec_default(fqn_distribution kind, uint64_t seed, fqn_dist_spec* out) {
  if (!out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    *out = from_spec(fqn::DistSpec::table_default(to_distribution(kind), seed));
  });
}

fqn_status fqn_dist_spec_set_param(fqn_dist_spec* spec, const char* name, double value) {
  if (!spec || !name) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    fqn::DistSpec s = to_spec(*spec);
    s.set_param(name, value);
    *spec = from_spec(s);
  });
}

fqn_status fqn_generator_create(const fqn_dist_spec* spec, fqn_generator** out) {
  if (!spec || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new fqn_generator{fqn::Generator(to_spec(*spec))}; });
}

void fqn_generator_destroy(fqn_generator* generator) { delete generator; }

fqn_status fqn_generator_fill(fqn_generator* generator, double* out, size_t n) {
  if (!generator || (!out && n > 0)) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] { generator->impl.fill({out, n}); });
}

fqn_bench_config fqn_bench_config_default(void) {
  const fqn::BenchConfig d;
  fqn_bench_config c{};
  c.tested_items = d.tested_items;
  c.runs = d.runs;
  c.seed = d.seed;
  c.t = d.t;
  c.dn_mode = FQN_DN_FINITE_SAMPLE;
  c.algorithm = FQN_ALGO_FAST;
  c.jobs = d.jobs;
  return c;
}

fqn_status fqn_bench_run(const fqn_bench_config* config, fqn_bench_progress_fn progress,
                         void* user, fqn_bench_report** out) {
  if (!config || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    fqn::BenchConfig c;
    if (config->w_values) {
      c.w_values.assign(config->w_values, config->w_values + config->w_count);
    }
    if (config->distributions) {
      c.distributions.clear();
      for (size_t i = 0; i < config->distribution_count; ++i) {
        c.distributions.push_back(to_distribution(config->distributions[i]));
      }
    }
    c.tested_items = config->tested_items;
    c.runs = config->runs;
    c.seed = config->seed;
    c.t = config->t;
    c.dn_mode = to_mode(config->dn_mode);
    c.algorithm = config->algorithm == FQN_ALGO_NAIVE ? fqn::Algorithm::kNaive
                                                      : fqn::Algorithm::kFast;
    c.jobs = config->jobs;
    fqn::BenchProgress cb;
    if (progress) {
      cb = [progress, user](const fqn::BenchRow& r) {
        const fqn_bench_row row = to_row(r);
        progress(&row, user);
      };
    }
    *out = new fqn_bench_report{fqn::run_bench(c, cb)};
  });
}

void fqn_bench_report_destroy(fqn_bench_report* report) { delete report; }

size_t fqn_bench_report_row_count(const fqn_bench_report* report) {
  return report ? report->impl.rows.size() : 0;
}

fqn_status fqn_bench_report_row(const fqn_bench_report* report, size_t i, fqn_bench_row* out) {
  if (!report || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  if (i >= report->impl.rows.size()) return fail(FQN_ERR_INVALID_PARAMETER, "row out of range");
  *out = to_row(report->impl.rows[i]);
  return FQN_OK;
}

size_t fqn_bench_report_aggregate_count(const fqn_bench_report* report) {
  return report ? report->impl.aggregates.size() : 0;
}

fqn_status fqn_bench_report_aggregate(const fqn_bench_report* report, size_t i,
                                      fqn_bench_aggregate* out) {
  if (!report || !out) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  if (i >= report->impl.aggregates.size()) {
    return fail(FQN_ERR_INVALID_PARAMETER, "aggregate out of range");
  }
  const auto& a = report->impl.aggregates[i];
  *out = {static_cast<fqn_distribution>(a.distribution), a.w, a.mean, a.ci95};
  return FQN_OK;
}

fqn_status fqn_bench_report_csv(const fqn_bench_report* report, char* buffer, size_t capacity,
                                size_t* needed) {
  if (!report || !needed) return fail(FQN_ERR_NULL_ARGUMENT, "null argument");
  std::string csv;
  if (const fqn_status st = guarded([&] { csv = fqn::to_csv(report->impl); }); st != FQN_OK) {
    return st;
  }
  *needed = csv.size() + 1;
  if (!buffer || capacity < *needed) return fail(FQN_ERR_BUFFER_TOO_SMALL, "csv buffer too small");
  std::memcpy(buffer, csv.c_str(), csv.size() + 1);
  return FQN_OK;
}

}  // extern "C"
