#include "astbayes/ast.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "astbayes/errors.hpp"

namespace astbayes {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

std::string describe(const ASTParams& p) {
  return "(alpha=" + std::to_string(p.alpha) + ", nu=" + std::to_string(p.nu) +
         ", mu=" + std::to_string(p.mu) + ", sigma=" + std::to_string(p.sigma) + ")";
}

// log of the bracket term for standardized distance z.
inline double log_kernel(double z, int nu) noexcept {
  if (nu == kNuMax) return -0.5 * z * z;
  const double v = static_cast<double>(nu);
  return -0.5 * (v + 1.0) * std::log1p(z * z / v);
}

}  // namespace

bool ASTParams::valid() const noexcept {
  return alpha > 0.0 && alpha < 1.0 && nu >= kNuMin && nu <= kNuMax && std::isfinite(mu) &&
         std::isfinite(sigma) && sigma > 0.0;
}

void ASTParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1): " + describe(*this));
  if (nu < kNuMin || nu > kNuMax) throw DomainError("nu must lie in {1..30}: " + describe(*this));
  if (!std::isfinite(mu)) throw DomainError("mu must be finite: " + describe(*this));
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw DomainError("sigma must be positive: " + describe(*this));
}

void Sample::validate() const {
  if (values.empty()) throw DomainError("sample is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("sample value " + std::to_string(i) + " is not finite");
  }
}

double log_normalizer(int nu) {
  if (nu < kNuMin || nu > kNuMax) throw DomainError("nu out of range: " + std::to_string(nu));
  if (nu == kNuMax) return -kLogSqrt2Pi;
  const double v = static_cast<double>(nu);
  return std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(std::numbers::pi * v);
}

double branch_z(double x, const ASTParams& p) noexcept {
  const double width = x <= p.mu ? 2.0 * p.alpha * p.sigma : 2.0 * (1.0 - p.alpha) * p.sigma;
  return (x - p.mu) / width;
}

double ast_log_pdf(double x, const ASTParams& p) {
  if (!std::isfinite(x)) throw DomainError("ast_log_pdf: x is not finite");
  p.validate();
  return log_normalizer(p.nu) - std::log(p.sigma) + log_kernel(branch_z(x, p), p.nu);
}

double ast_pdf(double x, const ASTParams& p) { return std::exp(ast_log_pdf(x, p)); }

Sample ast_sample(const ASTParams& p, std::size_t n, std::uint64_t rng_seed) {
  p.validate();
  if (n == 0) throw DomainError("ast_sample: n must be at least 1");

  std::mt19937_64 gen(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(static_cast<double>(p.nu));

  const double left = 2.0 * p.alpha * p.sigma;
  const double right = 2.0 * (1.0 - p.alpha) * p.sigma;

  Sample out;
  out.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool go_left = unif(gen) < p.alpha;
    double t = normal(gen);
    if (p.nu != kNuMax) t /= std::sqrt(chi2(gen) / p.nu);
    t = std::abs(t);
    out.values.push_back(go_left ? p.mu - left * t : p.mu + right * t);
  }
  return out;
}

double ast_log_likelihood(std::span<const double> values, const ASTParams& p) {
  if (values.empty()) throw DomainError("ast_log_likelihood: empty sample");
  p.validate();

  const double inv_left = 1.0 / (2.0 * p.alpha * p.sigma);
  const double inv_right = 1.0 / (2.0 * (1.0 - p.alpha) * p.sigma);
  double kernel_sum = 0.0;
  if (p.nu == kNuMax) {
    for (double x : values) {
      const double z = (x - p.mu) * (x <= p.mu ? inv_left : inv_right);
      kernel_sum += z * z;
    }
    kernel_sum *= -0.5;
  } else {
    const double inv_nu = 1.0 / p.nu;
    for (double x : values) {
      const double z = (x - p.mu) * (x <= p.mu ? inv_left : inv_right);
      kernel_sum += std::log1p(z * z * inv_nu);
    }
    kernel_sum *= -0.5 * (p.nu + 1.0);
  }
  const double n = static_cast<double>(values.size());
  return n * (log_normalizer(p.nu) - std::log(p.sigma)) + kernel_sum;
}

double ast_log_likelihood(const Sample& s, const ASTParams& p) { return ast_log_likelihood(s.values, p); }

DescriptiveStats descriptive_stats(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw DomainError("descriptive_stats: skewness needs at least 3 observations");

  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(n);

  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : values) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double ss = m2;
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);

  DescriptiveStats out;
  out.mean = mean;
  out.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return out;
}

DescriptiveStats descriptive_stats(const Sample& s) { return descriptive_stats(s.values); }

}  // namespace astbayes
