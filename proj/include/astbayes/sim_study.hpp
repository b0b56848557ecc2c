#pragma once

// Repeated-sampling study of the posterior for nu. Each cell fixes the true
// parameters and sample size; every replication simulates a data set, runs one
// chain, and records the posterior median and 95% interval of nu.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "astbayes/ast.hpp"
#include "astbayes/priors.hpp"
#include "astbayes/sampler.hpp"

namespace astbayes {

struct SimCellSpec {
  ASTParams true_params;
  std::size_t n = 100;
  std::size_t replications = 100;
  SamplerConfig sampler_cfg;  // sampler_cfg.seed is the cell seed

  void validate() const;
};

struct ReplicationOutcome {
  int median = 0;
  int ci_low = 0;
  int ci_high = 0;
};

struct SimCellResult {
  ASTParams true_params;
  std::size_t n = 0;
  double rel_rmse = 0.0;
  double coverage = 0.0;
  std::pair<int, int> median_ci{0, 0};
  std::vector<ReplicationOutcome> replications;
};

/// Aggregates replication outcomes: sqrt(mean (median - nu)^2) / nu, the share of
/// intervals containing nu, and the lower median of each interval endpoint.
SimCellResult aggregate_cell(const ASTParams& truth, std::size_t n, std::vector<ReplicationOutcome> outcomes);

/// Replication r draws data with derive_seed(cell seed, 2r) and runs the chain
/// with derive_seed(cell seed, 2r + 1). Replications run on up to
/// `max_threads` workers (0 = hardware concurrency).
SimCellResult run_cell(const SimCellSpec& spec, const JointPriorSpec& prior, unsigned max_threads = 0);

/// Cell i receives seed derive_seed(master_seed, i), overriding sampler_cfg.seed.
std::vector<SimCellResult> run_grid(std::vector<SimCellSpec> grid, std::uint64_t master_seed,
                                    const JointPriorSpec& prior, unsigned max_threads = 0);

}  // namespace astbayes
