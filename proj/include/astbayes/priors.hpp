#pragma once

// Joint objective prior: pi(alpha, nu, mu, sigma) ∝ pi(nu) Beta(alpha; 1/2, 1/2) / sigma.
// The 1/sigma factor is improper, so every value here is defined up to an
// additive constant and is only meaningful inside differences.

#include "astbayes/ast.hpp"
#include "astbayes/nu_prior.hpp"

namespace astbayes {

struct JointPriorSpec {
  static constexpr double kAlphaShape = 0.5;  // Jeffreys Beta(1/2, 1/2)
  NuPriorTable nu_prior = default_prior_table();
};

/// log Beta(alpha; 1/2, 1/2) = -log(pi) - 0.5 log(alpha (1 - alpha)).
double log_alpha_prior(double alpha);

double log_joint_prior(const ASTParams& p, const JointPriorSpec& spec);

double log_posterior(std::span<const double> values, const ASTParams& p, const JointPriorSpec& spec);
double log_posterior(const Sample& s, const ASTParams& p, const JointPriorSpec& spec);

}  // namespace astbayes
