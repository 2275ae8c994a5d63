/*
 * C interface to the streaming Qn outlier detector.
 *
 * Objects are opaque handles created by *_create and released by
 * *_destroy. Every fallible call returns an fqn_status; on failure
 * fqn_last_error() describes the problem for the calling thread until the
 * next failing call on that thread.
 */
#ifndef FQN_FQN_H
#define FQN_FQN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FQN_BUILDING_LIBRARY)
#    define FQN_API __declspec(dllexport)
#  else
#    define FQN_API __declspec(dllimport)
#  endif
#else
#  define FQN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fqn_status {
  FQN_OK = 0,
  FQN_ERR_INVALID_PARAMETER = 1,
  FQN_ERR_REJECTED_SAMPLE = 2,
  FQN_ERR_NOT_READY = 3,
  FQN_ERR_INVALID_RANK = 4,
  FQN_ERR_INTERNAL = 5,
  FQN_ERR_IO = 6,
  FQN_ERR_NULL_ARGUMENT = 7,
  FQN_ERR_BUFFER_TOO_SMALL = 8
} fqn_status;

typedef enum fqn_dn_mode {
  FQN_DN_UNIT = 0,
  FQN_DN_FINITE_SAMPLE = 1
} fqn_dn_mode;

typedef enum fqn_distribution {
  FQN_DIST_BETA = 0,
  FQN_DIST_CHI_SQUARED,
  FQN_DIST_EXPONENTIAL,
  FQN_DIST_GAMMA,
  FQN_DIST_HALF_NORMAL,
  FQN_DIST_INVERSE_GAUSSIAN,
  FQN_DIST_LOG_NORMAL,
  FQN_DIST_NORMAL,
  FQN_DIST_PARETO,
  FQN_DIST_POISSON,
  FQN_DIST_UNIFORM,
  FQN_DIST_ZIPF,
  FQN_DIST_COUNT
} fqn_distribution;

typedef enum fqn_algorithm {
  FQN_ALGO_FAST = 0,
  FQN_ALGO_NAIVE = 1
} fqn_algorithm;

typedef struct fqn_config {
  uint64_t w;          /* semi-window; window size is 2w+1 */
  double t;            /* outlier multiplier, > 0 */
  fqn_dn_mode dn_mode;
} fqn_config;

typedef struct fqn_verdict {
  uint64_t index;      /* 1-based stream index of the tested item */
  double value;
  double median;
  double qn;
  double score;        /* |value - median| */
  int is_outlier;      /* score > t * qn */
} fqn_verdict;

typedef struct fqn_qn_value {
  double stat;
  double qn;
} fqn_qn_value;

typedef struct fqn_dist_spec {
  fqn_distribution kind;
  double params[2];
  uint64_t seed;
  double contamination_rate;
  double contamination_magnitude;
} fqn_dist_spec;

typedef struct fqn_bench_config {
  const uint64_t* w_values;     /* NULL: 100,200,300,400,500 */
  size_t w_count;
  const fqn_distribution* distributions;  /* NULL: all twelve */
  size_t distribution_count;
  uint64_t tested_items;
  uint32_t runs;
  uint64_t seed;
  double t;
  fqn_dn_mode dn_mode;
  fqn_algorithm algorithm;
  uint32_t jobs;
} fqn_bench_config;

typedef struct fqn_bench_row {
  fqn_distribution distribution;
  uint64_t w;
  uint32_t run;
  double updates_per_sec;
  uint64_t stream_length;
} fqn_bench_row;

typedef struct fqn_bench_aggregate {
  fqn_distribution distribution;
  uint64_t w;
  double mean;
  double ci95;
} fqn_bench_aggregate;

typedef struct fqn_detector fqn_detector;
typedef struct fqn_generator fqn_generator;
typedef struct fqn_bench_report fqn_bench_report;

typedef void (*fqn_bench_progress_fn)(const fqn_bench_row* row, void* user);

FQN_API const char* fqn_version(void);
FQN_API const char* fqn_status_string(fqn_status status);
FQN_API const char* fqn_last_error(void);

/* Detector. t = 3, finite-sample d_n. */
FQN_API fqn_config fqn_config_default(uint64_t w);
FQN_API fqn_status fqn_detector_create(const fqn_config* config, fqn_detector** out);
FQN_API void fqn_detector_destroy(fqn_detector* detector);
/* Feeds one value. *has_verdict is set to 1 and *verdict filled once the
 * window is full. A non-finite value yields FQN_ERR_REJECTED_SAMPLE and
 * leaves the detector unchanged. */
FQN_API fqn_status fqn_detector_push(fqn_detector* detector, double value,
                                     fqn_verdict* verdict, int* has_verdict);
FQN_API fqn_status fqn_detector_window_median(const fqn_detector* detector, double* out);
FQN_API uint64_t fqn_detector_next_test_index(const fqn_detector* detector);

/* Static Qn. `fast` selects linear-time matrix selection over a sorted copy;
 * otherwise all pairwise differences are materialized. */
FQN_API fqn_status fqn_qn_compute(const double* values, size_t n, fqn_dn_mode mode,
                                  int fast, fqn_qn_value* out);
FQN_API fqn_status fqn_qn_rank(uint64_t s, uint64_t* out);
FQN_API fqn_status fqn_dn_factor(uint64_t s, fqn_dn_mode mode, double* out);

/* Synthetic data. */
FQN_API const char* fqn_distribution_name(fqn_distribution kind);
FQN_API fqn_status fqn_distribution_from_name(const char* name, fqn_distribution* out);
FQN_API fqn_status fqn_dist_spec_default(fqn_distribution kind, uint64_t seed,
                                         fqn_dist_spec* out);
FQN_API fqn_status fqn_dist_spec_set_param(fqn_dist_spec* spec, const char* name, double value);
FQN_API fqn_status fqn_generator_create(const fqn_dist_spec* spec, fqn_generator** out);
FQN_API void fqn_generator_destroy(fqn_generator* generator);
FQN_API fqn_status fqn_generator_fill(fqn_generator* generator, double* out, size_t n);

/* Benchmark harness. */
FQN_API fqn_bench_config fqn_bench_config_default(void);
FQN_API fqn_status fqn_bench_run(const fqn_bench_config* config, fqn_bench_progress_fn progress,
                                 void* user, fqn_bench_report** out);
FQN_API void fqn_bench_report_destroy(fqn_bench_report* report);
FQN_API size_t fqn_bench_report_row_count(const fqn_bench_report* report);
FQN_API fqn_status fqn_bench_report_row(const fqn_bench_report* report, size_t i,
                                        fqn_bench_row* out);
FQN_API size_t fqn_bench_report_aggregate_count(const fqn_bench_report* report);
FQN_API fqn_status fqn_bench_report_aggregate(const fqn_bench_report* report, size_t i,
                                              fqn_bench_aggregate* out);
/* Writes the CSV report including the trailing NUL. *needed receives the
 * required size; FQN_ERR_BUFFER_TOO_SMALL if `capacity` is short. */
FQN_API fqn_status fqn_bench_report_csv(const fqn_bench_report* report, char* buffer,
                                        size_t capacity, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* FQN_FQN_H */
