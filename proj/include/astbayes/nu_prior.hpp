#pragma once

// Objective prior for the discrete degrees of freedom nu in {1..30}.
//
// Each nu is weighted by the information lost if it were removed from the
// model space: mass(nu) proportional to exp(D(nu -> neighbor)) - 1, where D is
// the Kullback-Leibler divergence to the adjacent density. nu <= 28 uses the
// forward neighbor nu+1; nu = 29 and nu = 30 (skew-normal) use nu-1.
//
// The divergence between neighbors does not depend on alpha, mu or sigma, so
// the table is computed once at (0.5, 0, 1) and shared.

#include <array>

#include "astbayes/ast.hpp"

namespace astbayes {

inline constexpr double kDefaultQuadTol = 1e-9;

/// The two one-sided pieces of D(p || q), split at the common location.
struct SplitDivergence {
  double left = 0.0;   // integral over (-inf, mu]
  double right = 0.0;  // integral over (mu, inf)
  double total() const noexcept { return left + right; }
};

struct NuPriorTable {
  std::array<double, kNuMax> masses{};        // index nu-1
  std::array<double, kNuMax> kl_neighbors{};  // divergence that produced each mass
  double quad_tol = kDefaultQuadTol;

  double mass(int nu) const;
  double kl_neighbor(int nu) const;
};

/// D(p || q) = integral of f_p log(f_p / f_q). p and q must share mu so the split
/// point is common to both densities.
SplitDivergence kl_divergence_split(const ASTParams& p, const ASTParams& q, double quad_tol = kDefaultQuadTol);
double kl_divergence(const ASTParams& p, const ASTParams& q, double quad_tol = kDefaultQuadTol);

/// The neighbor nu' that defines the prior weight of nu.
int prior_neighbor(int nu);

/// Divergence from f_nu to its neighbor at the given (alpha, mu, sigma).
double neighbor_divergence(int nu, double alpha = 0.5, double mu = 0.0, double sigma = 1.0,
                           double quad_tol = kDefaultQuadTol);

/// Builds the normalized table. quad_tol in (0, 1e-4]. Throws NumericalError if the
/// forward divergences fail to decrease strictly over nu = 1..28.
NuPriorTable build_prior_table(double quad_tol = kDefaultQuadTol, double alpha = 0.5, double mu = 0.0,
                               double sigma = 1.0);

/// Lazily built, immutable table at the default tolerance.
const NuPriorTable& default_prior_table();

double log_prior_nu(int nu, const NuPriorTable& table);

}  // namespace astbayes
