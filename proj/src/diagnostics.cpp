#include "astbayes/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "astbayes/errors.hpp"
#include "astbayes/seeding.hpp"

namespace astbayes {

std::string_view parameter_name(Parameter p) noexcept {
  switch (p) {
    case Parameter::Alpha: return "alpha";
    case Parameter::Mu: return "mu";
    case Parameter::Sigma: return "sigma";
    case Parameter::Nu: return "nu";
  }
  return "?";
}

std::vector<double> draws(const Trace& t, Parameter p) {
  switch (p) {
    case Parameter::Alpha: return t.alpha;
    case Parameter::Mu: return t.mu;
    case Parameter::Sigma: return t.sigma;
    case Parameter::Nu: return {t.nu.begin(), t.nu.end()};
  }
  return {};
}

double quantile_type1(std::span<const double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  std::vector<double> v(values.begin(), values.end());
  const auto n = static_cast<double>(v.size());
  // Guard q n landing a hair above an integer through rounding.
  const double rank = std::ceil(q * n - 1e-9);
  const auto k = static_cast<std::size_t>(std::clamp(rank, 1.0, n)) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

const ParameterSummary& PosteriorSummary::operator[](Parameter p) const noexcept {
  switch (p) {
    case Parameter::Alpha: return alpha;
    case Parameter::Mu: return mu;
    case Parameter::Sigma: return sigma;
    case Parameter::Nu: break;
  }
  return nu;
}

ParameterSummary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summarize: empty trace");
  ParameterSummary s;
  double sum = 0.0;
  for (double x : values) sum += x;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile_type1(values, 0.5);
  s.ci_low = quantile_type1(values, 0.025);
  s.ci_high = quantile_type1(values, 0.975);
  return s;
}

PosteriorSummary summarize(const Trace& t) {
  if (t.size() == 0) throw DomainError("summarize: empty trace");
  return {summarize(t.alpha), summarize(t.mu), summarize(t.sigma), summarize(draws(t, Parameter::Nu))};
}

Trace pool(std::span<const Trace> traces) {
  Trace out;
  if (traces.empty()) return out;
  out.seed = traces.front().seed;
  std::size_t total = 0;
  for (const Trace& t : traces) total += t.size();
  for (const Trace& t : traces) {
    out.alpha.insert(out.alpha.end(), t.alpha.begin(), t.alpha.end());
    out.mu.insert(out.mu.end(), t.mu.begin(), t.mu.end());
    out.sigma.insert(out.sigma.end(), t.sigma.begin(), t.sigma.end());
    out.nu.insert(out.nu.end(), t.nu.begin(), t.nu.end());
    for (std::size_t b = 0; b < 4; ++b) {
      out.acceptance_rates[b] += t.acceptance_rates[b] * static_cast<double>(t.size()) / static_cast<double>(total);
    }
    out.alpha_auto_rejects += t.alpha_auto_rejects;
  }
  return out;
}

double gelman_rubin(std::span<const std::vector<double>> chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw DomainError("gelman_rubin: need at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw DomainError("gelman_rubin: chains need at least two draws");
  for (const auto& c : chains) {
    if (c.size() != n) throw DomainError("gelman_rubin: chains have unequal lengths");
  }

  std::vector<double> means(m, 0.0);
  double within = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (double x : chains[j]) means[j] += x;
    means[j] /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : chains[j]) ss += (x - means[j]) * (x - means[j]);
    within += ss / static_cast<double>(n - 1);
  }
  within /= static_cast<double>(m);

  double grand = 0.0;
  for (double mj : means) grand += mj;
  grand /= static_cast<double>(m);
  double between = 0.0;
  for (double mj : means) between += (mj - grand) * (mj - grand);
  between *= static_cast<double>(n) / static_cast<double>(m - 1);

  if (!(within > 0.0)) throw NumericalError("gelman_rubin: zero within-chain variance");
  const double nd = static_cast<double>(n);
  return std::sqrt(((nd - 1.0) / nd * within + between / nd) / within);
}

double gelman_rubin(std::span<const Trace> traces, Parameter p) {
  std::vector<std::vector<double>> chains;
  chains.reserve(traces.size());
  for (const Trace& t : traces) chains.push_back(draws(t, p));
  return gelman_rubin(chains);
}

std::vector<double> running_mean(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

std::vector<double> running_mean(const Trace& t, Parameter p) { return running_mean(draws(t, p)); }

PredictiveDensity posterior_predictive(const Trace& t, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("posterior_predictive: empty grid");
  if (t.size() == 0) throw DomainError("posterior_predictive: empty trace");

  PredictiveDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.density.assign(grid.size(), 0.0);
  out.n_posterior_draws = t.size();
  for (std::size_t s = 0; s < t.size(); ++s) {
    const ASTParams p = t.draw(s);
    for (std::size_t g = 0; g < grid.size(); ++g) out.density[g] += ast_pdf(grid[g], p);
  }
  for (double& d : out.density) d /= static_cast<double>(t.size());
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw DomainError("linear_grid: need hi > lo and at least two points");
  std::vector<double> g(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + h * static_cast<double>(i);
  return g;
}

DescriptiveStats predictive_moments(const Trace& t, std::uint64_t seed) {
  if (t.size() == 0) throw DomainError("predictive_moments: empty trace");
  std::vector<double> sims;
  sims.reserve(t.size());
  for (std::size_t s = 0; s < t.size(); ++s) sims.push_back(ast_sample(t.draw(s), 1, derive_seed(seed, s)).values[0]);
  return descriptive_stats(sims);
}

}  // namespace astbayes
