#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "astbayes/ast.hpp"
#include "astbayes/sampler.hpp"

namespace astbayes {

enum class Parameter { Alpha, Mu, Sigma, Nu };

inline constexpr std::array<Parameter, 4> kAllParameters{Parameter::Alpha, Parameter::Mu, Parameter::Sigma,
                                                         Parameter::Nu};

std::string_view parameter_name(Parameter p) noexcept;

/// Draws of one parameter as doubles.
std::vector<double> draws(const Trace& t, Parameter p);

/// Nearest-rank (type 1) empirical quantile: the ceil(q n)-th order statistic.
double quantile_type1(std::span<const double> values, double q);

struct ParameterSummary {
  double mean = 0.0;
  double median = 0.0;
  double ci_low = 0.0;   // 2.5%
  double ci_high = 0.0;  // 97.5%
};

struct PosteriorSummary {
  ParameterSummary alpha;
  ParameterSummary mu;
  ParameterSummary sigma;
  ParameterSummary nu;

  const ParameterSummary& operator[](Parameter p) const noexcept;
};

ParameterSummary summarize(std::span<const double> values);
PosteriorSummary summarize(const Trace& t);

/// Concatenation of the draws of several chains.
Trace pool(std::span<const Trace> traces);

/// Potential scale reduction factor sqrt(((n-1)/n W + B/n) / W) for m chains of
/// length n, with B = n/(m-1) sum (chain mean - grand mean)^2 and W the mean
/// within-chain variance. No degrees-of-freedom correction.
double gelman_rubin(std::span<const std::vector<double>> chains);
double gelman_rubin(std::span<const Trace> traces, Parameter p);

std::vector<double> running_mean(std::span<const double> values);
std::vector<double> running_mean(const Trace& t, Parameter p);

struct PredictiveDensity {
  std::vector<double> grid;
  std::vector<double> density;
  std::size_t n_posterior_draws = 0;
};

/// density(g) = mean over draws of ast_pdf(g, draw).
PredictiveDensity posterior_predictive(const Trace& t, std::span<const double> grid);

/// Evenly spaced grid of `points` nodes on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// One ast_sample draw per retained posterior draw, then descriptive stats.
DescriptiveStats predictive_moments(const Trace& t, std::uint64_t seed);

}  // namespace astbayes
