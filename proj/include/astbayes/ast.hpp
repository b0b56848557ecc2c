#pragma once

// Asymmetric Student-t (AST) density kernel.
//
//   f(x) = K(nu)/sigma * [1 + ((x-mu)/(2 alpha sigma))^2 / nu]^(-(nu+1)/2)        x <= mu
//   f(x) = K(nu)/sigma * [1 + ((x-mu)/(2 (1-alpha) sigma))^2 / nu]^(-(nu+1)/2)   x >  mu
//
// with K(nu) = Gamma((nu+1)/2) / (sqrt(pi nu) Gamma(nu/2)). The left branch
// carries mass alpha, the right branch 1 - alpha. nu = kNuMax stands for the
// skew-normal limit, where the bracket becomes exp(-z^2/2) and K -> 1/sqrt(2 pi).

#include <cstdint>
#include <span>
#include <vector>

namespace astbayes {

inline constexpr int kNuMin = 1;
inline constexpr int kNuMax = 30;

struct ASTParams {
  double alpha = 0.5;
  int nu = 5;
  double mu = 0.0;
  double sigma = 1.0;

  bool valid() const noexcept;
  /// Throws DomainError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ASTParams&, const ASTParams&) = default;
};

struct Sample {
  std::vector<double> values;
  bool log_transformed = false;

  std::size_t size() const noexcept { return values.size(); }
  /// Throws DomainError if empty or if any value is non-finite.
  void validate() const;
};

struct DescriptiveStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
};

/// log K(nu); for nu == kNuMax returns -log(sqrt(2 pi)).
double log_normalizer(int nu);

/// Standardized distance from mu on the branch x falls on.
double branch_z(double x, const ASTParams& p) noexcept;

double ast_log_pdf(double x, const ASTParams& p);
double ast_pdf(double x, const ASTParams& p);

/// Draws n i.i.d. variates. With probability alpha returns mu - 2 alpha sigma |T|,
/// otherwise mu + 2 (1 - alpha) sigma |T|, T standard t_nu (standard normal at kNuMax).
Sample ast_sample(const ASTParams& p, std::size_t n, std::uint64_t rng_seed);

double ast_log_likelihood(std::span<const double> values, const ASTParams& p);
double ast_log_likelihood(const Sample& s, const ASTParams& p);

/// Mean, sample standard deviation (n-1) and moment skewness m3 / m2^{3/2}.
DescriptiveStats descriptive_stats(std::span<const double> values);
DescriptiveStats descriptive_stats(const Sample& s);

}  // namespace astbayes
