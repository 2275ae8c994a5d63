#include "fqn/datagen.hpp"

#include <cmath>
#include <string>

#include "fqn/error.hpp"

namespace fqn {

namespace {

struct KindInfo {
  std::string_view name;
  std::array<std::string_view, 2> params;
  std::size_t n_params;
  std::array<double, 2> defaults;
};

constexpr std::array<KindInfo, 12> kKinds = {{
    {"beta", {"alpha", "beta"}, 2, {2.0, 0.25}},
    {"chi_squared", {"nu", ""}, 1, {3.0, 0.0}},
    {"exponential", {"lambda", ""}, 1, {0.5, 0.0}},
    {"gamma", {"alpha", "beta"}, 2, {1.0, 2.0}},
    {"half_normal", {"theta", ""}, 1, {0.5, 0.0}},
    {"inverse_gaussian", {"mu", "lambda"}, 2, {2.0, 1.0}},
    {"log_normal", {"mu", "sigma"}, 2, {1.0, 3.0}},
    {"normal", {"mu", "sigma"}, 2, {1.0, 3.0}},
    {"pareto", {"k", "alpha"}, 2, {3.0, 0.75}},
    {"poisson", {"mu", ""}, 1, {3.0, 0.0}},
    {"uniform", {"min", "max"}, 2, {0.0, 100000.0}},
    {"zipf", {"n", "rho"}, 2, {1e8, 1.2}},
}};

const KindInfo& info(Distribution kind) { return kKinds[static_cast<std::size_t>(kind)]; }

void require(bool ok, Distribution kind, const char* what) {
  if (!ok) {
    raise(ErrorCode::kInvalidParameter,
          std::string(name(kind)) + ": " + what);
  }
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Numerically stable pieces of the Zipf rejection-inversion sampler
// (Hoermann and Derflinger).
double helper1(double x) {
  return std::fabs(x) > 1e-8 ? std::log1p(x) / x : 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}

double helper2(double x) {
  return std::fabs(x) > 1e-8 ? std::expm1(x) / x
                             : 1.0 + x * 0.5 * (1.0 + x * (1.0 / 3.0) * (1.0 + 0.25 * x));
}

double zipf_h(double x, double s) { return std::exp(-s * std::log(x)); }

double zipf_h_integral(double x, double s) {
  const double log_x = std::log(x);
  return helper2((1.0 - s) * log_x) * log_x;
}

double zipf_h_integral_inverse(double x, double s) {
  double t = x * (1.0 - s);
  if (t < -1.0) t = -1.0;
  return std::exp(helper1(t) * x);
}

}  // namespace

std::string_view name(Distribution kind) noexcept { return info(kind).name; }

std::optional<Distribution> distribution_from_name(std::string_view n) noexcept {
  for (const Distribution kind : kAllDistributions) {
    if (info(kind).name == n) return kind;
  }
  return std::nullopt;
}

std::span<const std::string_view> param_names(Distribution kind) noexcept {
  const KindInfo& k = info(kind);
  return {k.params.data(), k.n_params};
}

DistSpec DistSpec::table_default(Distribution kind, std::uint64_t seed) {
  DistSpec spec;
  spec.kind = kind;
  spec.params = info(kind).defaults;
  spec.seed = seed;
  return spec;
}

void DistSpec::set_param(std::string_view param, double value) {
  const auto names = param_names(kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == param) {
      params[i] = value;
      return;
    }
  }
  raise(ErrorCode::kInvalidParameter,
        std::string(name(kind)) + " has no parameter '" + std::string(param) + "'");
}

void DistSpec::validate() const {
  const double p = params[0];
  const double q = params[1];
  switch (kind) {
    case Distribution::kBeta:
    case Distribution::kGamma:
    case Distribution::kInverseGaussian:
    case Distribution::kPareto:
      require(positive(p) && positive(q), kind, "parameters must be positive");
      break;
    case Distribution::kChiSquared:
    case Distribution::kExponential:
    case Distribution::kHalfNormal:
      require(positive(p), kind, "parameter must be positive");
      break;
    case Distribution::kLogNormal:
    case Distribution::kNormal:
      require(std::isfinite(p) && positive(q), kind, "sigma must be positive");
      break;
    case Distribution::kPoisson:
      require(positive(p) && p < 1e12, kind, "mu must be in (0, 1e12)");
      break;
    case Distribution::kUniform:
      require(std::isfinite(p) && std::isfinite(q) && p < q, kind, "need finite min < max");
      break;
    case Distribution::kZipf:
      require(p >= 1.0 && p <= 9007199254740992.0 && std::floor(p) == p, kind,
              "n must be a positive integer");
      require(positive(q), kind, "rho must be positive");
      break;
  }
  require(contamination.rate >= 0.0 && contamination.rate <= 1.0, kind,
          "contamination rate must be in [0, 1]");
  require(std::isfinite(contamination.magnitude), kind,
          "contamination magnitude must be finite");
}

Generator::Generator(const DistSpec& spec) : spec_(spec), engine_(spec.seed) {
  spec_.validate();
  if (spec_.kind == Distribution::kZipf) {
    const double s = spec_.params[1];
    zipf_h_x1_ = zipf_h_integral(1.5, s) - 1.0;
    zipf_h_n_ = zipf_h_integral(spec_.params[0] + 0.5, s);
    zipf_s_ = 2.0 - zipf_h_integral_inverse(zipf_h_integral(2.5, s) - zipf_h(2.0, s), s);
  }
}

// 53 random bits centered in their cell: never 0, never 1.
double Generator::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar method; the second variate of each pair is kept.
double Generator::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = v * f;
  return u * f;
}

// Marsaglia-Tsang for shape >= 1, boosted by U^(1/shape) below 1. Unit scale.
double Generator::gamma(double shape) {
  if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Multiplication method for small means, PTRS (Hoermann) otherwise.
double Generator::poisson() {
  const double mu = spec_.params[0];
  if (mu < 30.0) {
    const double limit = std::exp(-mu);
    double prod = uniform();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return static_cast<double>(k);
  }
  const double smu = std::sqrt(mu);
  const double log_mu = std::log(mu);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mu + k * log_mu - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

double Generator::zipf() {
  const double n = spec_.params[0];
  const double s = spec_.params[1];
  for (;;) {
    const double u = zipf_h_n_ + uniform() * (zipf_h_x1_ - zipf_h_n_);
    const double x = zipf_h_integral_inverse(u, s);
    double k = std::floor(x + 0.5);
    if (k < 1.0) k = 1.0;
    else if (k > n) k = n;
    if (k - x <= zipf_s_ || u >= zipf_h_integral(k + 0.5, s) - zipf_h(k, s)) return k;
  }
}

double Generator::draw() {
  const double p = spec_.params[0];
  const double q = spec_.params[1];
  switch (spec_.kind) {
    case Distribution::kBeta: {
      const double x = gamma(p);
      const double y = gamma(q);
      return x / (x + y);
    }
    case Distribution::kChiSquared: return 2.0 * gamma(0.5 * p);
    case Distribution::kExponential: return -std::log(uniform()) / p;
    case Distribution::kGamma: return q * gamma(p);
    case Distribution::kHalfNormal: return p * std::fabs(normal());
    case Distribution::kInverseGaussian: {
      // Michael-Schucany-Haas; the two roots multiply to mu^2, so the small
      // one is taken as mu^2 / large to avoid cancellation.
      const double z = normal();
      const double nu = z * z;
      const double large =
          p + p * p * nu / (2.0 * q) + p / (2.0 * q) * std::sqrt(4.0 * p * q * nu + p * p * nu * nu);
      const double small = p * p / large;
      return uniform() <= p / (p + small) ? small : large;
    }
    case Distribution::kLogNormal: return std::exp(p + q * normal());
    case Distribution::kNormal: return p + q * normal();
    case Distribution::kPareto: return p * std::pow(uniform(), -1.0 / q);
    case Distribution::kPoisson: return poisson();
    case Distribution::kUniform: return p + (q - p) * uniform();
    case Distribution::kZipf: return zipf();
  }
  return 0.0;
}

double Generator::next() {
  double v = draw();
  if (spec_.contamination.rate > 0.0 && uniform() < spec_.contamination.rate) {
    v += spec_.contamination.magnitude;
  }
  return v;
}

void Generator::fill(std::span<double> out) {
  for (double& v : out) v = next();
}

std::vector<double> generate(const DistSpec& spec, std::size_t n) {
  Generator gen(spec);
  std::vector<double> out(n);
  gen.fill(out);
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fqn
