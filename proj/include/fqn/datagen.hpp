#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fqn {

// Synthetic workloads. Parameter conventions (two slots per kind):
//
//   beta              alpha, beta         shape, shape
//   chi_squared       nu                  degrees of freedom
//   exponential       lambda              rate
//   gamma             alpha, beta         shape, scale
//   half_normal       theta               scale of |N(0,1)|
//   inverse_gaussian  mu, lambda          mean, shape
//   log_normal        mu, sigma           of the underlying normal
//   normal            mu, sigma
//   pareto            k, alpha            scale (minimum), shape
//   poisson           mu                  mean
//   uniform           min, max
//   zipf              n, rho              P(r) ~ r^-rho on ranks 1..n
//
// All variates are derived from std::mt19937_64, whose output sequence is
// fixed by the C++ standard, through the transforms documented in
// datagen.cpp, so a (spec, n) pair reproduces the same stream everywhere the
// math library agrees on log/exp/sqrt.
enum class Distribution {
  kBeta,
  kChiSquared,
  kExponential,
  kGamma,
  kHalfNormal,
  kInverseGaussian,
  kLogNormal,
  kNormal,
  kPareto,
  kPoisson,
  kUniform,
  kZipf,
};

inline constexpr std::array<Distribution, 12> kAllDistributions = {
    Distribution::kBeta,      Distribution::kChiSquared,      Distribution::kExponential,
    Distribution::kGamma,     Distribution::kHalfNormal,      Distribution::kInverseGaussian,
    Distribution::kLogNormal, Distribution::kNormal,          Distribution::kPareto,
    Distribution::kPoisson,   Distribution::kUniform,         Distribution::kZipf,
};

std::string_view name(Distribution kind) noexcept;
std::optional<Distribution> distribution_from_name(std::string_view name) noexcept;
// Names of the parameter slots used by `kind` (one or two entries).
std::span<const std::string_view> param_names(Distribution kind) noexcept;

// Not part of the benchmark workloads: optionally shifts a random fraction
// of the items by a fixed magnitude so detection has something to find.
struct Contamination {
  double rate = 0.0;       // probability per item, in [0, 1]
  double magnitude = 0.0;  // added to a contaminated item
};

struct DistSpec {
  Distribution kind = Distribution::kNormal;
  std::array<double, 2> params{};
  std::uint64_t seed = 0;
  Contamination contamination;

  // The parameters used for the throughput experiments.
  static DistSpec table_default(Distribution kind, std::uint64_t seed = 0);

  void set_param(std::string_view param, double value);
  // Throws kInvalidParameter when a parameter is outside its domain.
  void validate() const;
};

class Generator {
 public:
  explicit Generator(const DistSpec& spec);

  double next();
  void fill(std::span<double> out);

  const DistSpec& spec() const noexcept { return spec_; }

 private:
  double uniform();  // open interval (0, 1)
  double normal();
  double gamma(double shape);
  double poisson();
  double zipf();
  double draw();

  DistSpec spec_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
  // Zipf rejection-inversion constants.
  double zipf_h_x1_ = 0.0;
  double zipf_h_n_ = 0.0;
  double zipf_s_ = 0.0;
};

std::vector<double> generate(const DistSpec& spec, std::size_t n);

// Seed mixing (splitmix64 finalizer) for deriving per-cell seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace fqn
