#include "astbayes/priors.hpp"

#include <cmath>
#include <numbers>

#include "astbayes/errors.hpp"

namespace astbayes {

double log_alpha_prior(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha prior: alpha must lie in (0,1)");
  // B(1/2, 1/2) = pi
  return -std::log(std::numbers::pi) - 0.5 * (std::log(alpha) + std::log1p(-alpha));
}

double log_joint_prior(const ASTParams& p, const JointPriorSpec& spec) {
  p.validate();
  return log_prior_nu(p.nu, spec.nu_prior) + log_alpha_prior(p.alpha) - std::log(p.sigma);
}

double log_posterior(std::span<const double> values, const ASTParams& p, const JointPriorSpec& spec) {
  return ast_log_likelihood(values, p) + log_joint_prior(p, spec);
}

double log_posterior(const Sample& s, const ASTParams& p, const JointPriorSpec& spec) {
  return log_posterior(std::span<const double>(s.values), p, spec);
}

}  // namespace astbayes
