#pragma once

// Metropolis-within-Gibbs sampler for the AST posterior. One iteration updates,
// in order:
//   1. nu    ~ DU(1, 30), symmetric independence proposal
//   2. mu    ~ N(mu, s_mu^2) random walk
//   3. sigma ~ Gamma(a_sigma, b_sigma) independence proposal (rate b_sigma)
//   4. alpha ~ Beta(a, b) with mean equal to the current alpha and variance v_alpha
// Each block is accepted with min(1, posterior ratio x reverse/forward proposal ratio).

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "astbayes/ast.hpp"
#include "astbayes/priors.hpp"

namespace astbayes {

using Rng = std::mt19937_64;

enum class Block : std::size_t { Nu = 0, Mu = 1, Sigma = 2, Alpha = 3 };

struct SamplerConfig {
  std::size_t iterations = 50000;  // total, including burn-in
  std::size_t burn_in = 10000;
  std::size_t n_chains = 1;
  std::size_t thin = 1;
  std::uint64_t seed = 1;

  // Proposal constants. Unset values are derived from the data and, when
  // `adapt` is on, retuned from burn-in draws. Set values are used verbatim.
  std::optional<double> s_mu;     // random-walk standard deviation for mu
  std::optional<double> a_sigma;  // Gamma shape for sigma
  std::optional<double> b_sigma;  // Gamma rate for sigma
  std::optional<double> v_alpha;  // Beta proposal variance for alpha, < 0.25
  bool adapt = true;

  // Blocks set to false keep their initial value for the whole run.
  std::array<bool, 4> update_block{true, true, true, true};

  void validate() const;
  std::size_t retained() const noexcept { return (iterations - burn_in + thin - 1) / thin; }
};

struct ProposalTuning {
  double s_mu = 0.1;
  double a_sigma = 2.0;
  double b_sigma = 2.0;
  double v_alpha = 0.01;
};

struct Trace {
  std::vector<double> alpha;
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<int> nu;
  std::array<double, 4> acceptance_rates{};  // indexed by Block, post-burn-in
  std::size_t alpha_auto_rejects = 0;        // post-burn-in, matched Beta did not exist
  std::uint64_t seed = 0;
  ProposalTuning tuning;                      // constants in force after burn-in

  std::size_t size() const noexcept { return nu.size(); }
  ASTParams draw(std::size_t i) const { return {alpha[i], nu[i], mu[i], sigma[i]}; }
};

/// Scale estimate used for pilots and inits: 1.4826 * MAD, falling back to the SD.
double robust_scale(std::span<const double> values);

/// Pilot proposal constants for unset config fields: s_mu = 2.4 s / sqrt(n),
/// Gamma with mean s and variance s^2 / 2, v_alpha = 0.01, s = robust_scale.
ProposalTuning initial_tuning(const SamplerConfig& cfg, std::span<const double> values);

/// alpha = 0.5, mu = median, sigma = robust_scale, nu = 5.
ASTParams default_init(std::span<const double> values);

/// Chain 0 gets default_init; the rest are spread deterministically from `seed`.
std::vector<ASTParams> default_inits(std::span<const double> values, std::size_t n_chains, std::uint64_t seed);

// Proposal kernels.

int propose_nu(Rng& rng);
double propose_mu(double current, double s_mu, Rng& rng);
double propose_sigma(double a_sigma, double b_sigma, Rng& rng);

struct BetaShape {
  double a = 0.0;
  double b = 0.0;
};

/// Beta(a, b) with the given mean and variance; nullopt unless 0 < variance < mean (1 - mean).
std::optional<BetaShape> beta_moment_match(double mean, double variance);

/// Draw from the moment-matched Beta around `current`. nullopt when the Beta does
/// not exist or the draw underflows to 0 or 1.
std::optional<double> propose_alpha(double current, double v_alpha, Rng& rng);

double log_normal_density(double x, double mean, double sd);
double log_gamma_density(double x, double shape, double rate);
double log_beta_density(double x, const BetaShape& shape);

/// min(1, exp(log_ratio)).
double acceptance_probability(double log_ratio);

/// log q(current | proposed) - log q(proposed | current) for each block.
double mu_proposal_log_correction(double current, double proposed, double s_mu);
double sigma_proposal_log_correction(double current, double proposed, double a_sigma, double b_sigma);
std::optional<double> alpha_proposal_log_correction(double current, double proposed, double v_alpha);

Trace run_chain(std::span<const double> values, const SamplerConfig& cfg, const JointPriorSpec& spec,
                const ASTParams& init);
Trace run_chain(const Sample& s, const SamplerConfig& cfg, const JointPriorSpec& spec, const ASTParams& init);

/// One chain per init; chain k is seeded with derive_seed(cfg.seed, k). Chains run
/// concurrently and the result does not depend on scheduling.
std::vector<Trace> run_chains(const Sample& s, const SamplerConfig& cfg, const JointPriorSpec& spec,
                              std::span<const ASTParams> inits);

}  // namespace astbayes
