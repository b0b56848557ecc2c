#include "astbayes/sim_study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "astbayes/diagnostics.hpp"
#include "astbayes/errors.hpp"
#include "astbayes/seeding.hpp"

namespace astbayes {

namespace {

int lower_median(std::vector<int> v) {
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

ReplicationOutcome run_replication(const SimCellSpec& spec, const JointPriorSpec& prior, std::size_t r) {
  const std::uint64_t cell_seed = spec.sampler_cfg.seed;
  const Sample data = ast_sample(spec.true_params, spec.n, derive_seed(cell_seed, 2 * r));
  SamplerConfig cfg = spec.sampler_cfg;
  cfg.n_chains = 1;
  cfg.seed = derive_seed(cell_seed, 2 * r + 1);
  const Trace trace = run_chain(data, cfg, prior, default_init(data.values));
  const ParameterSummary nu = summarize(draws(trace, Parameter::Nu));
  return {static_cast<int>(nu.median), static_cast<int>(nu.ci_low), static_cast<int>(nu.ci_high)};
}

}  // namespace

void SimCellSpec::validate() const {
  true_params.validate();
  if (n == 0) throw DomainError("sim cell: n must be positive");
  if (replications == 0) throw DomainError("sim cell: replications must be positive");
  sampler_cfg.validate();
}

SimCellResult aggregate_cell(const ASTParams& truth, std::size_t n, std::vector<ReplicationOutcome> outcomes) {
  if (outcomes.empty()) throw DomainError("aggregate_cell: no replications");
  SimCellResult res;
  res.true_params = truth;
  res.n = n;

  const double nu = truth.nu;
  double sq = 0.0;
  std::size_t covered = 0;
  std::vector<int> lows;
  std::vector<int> highs;
  for (const auto& o : outcomes) {
    sq += (o.median - nu) * (o.median - nu);
    covered += (o.ci_low <= truth.nu && truth.nu <= o.ci_high) ? 1 : 0;
    lows.push_back(o.ci_low);
    highs.push_back(o.ci_high);
  }
  const auto reps = static_cast<double>(outcomes.size());
  res.rel_rmse = std::sqrt(sq / reps) / nu;
  res.coverage = static_cast<double>(covered) / reps;
  res.median_ci = {lower_median(lows), lower_median(highs)};
  res.replications = std::move(outcomes);
  return res;
}

SimCellResult run_cell(const SimCellSpec& spec, const JointPriorSpec& prior, unsigned max_threads) {
  spec.validate();
  std::vector<ReplicationOutcome> outcomes(spec.replications);

  unsigned workers = max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : max_threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.replications));

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_at = spec.replications;
  std::exception_ptr failure;

  const auto work = [&] {
    for (std::size_t r = next++; r < spec.replications; r = next++) {
      try {
        outcomes[r] = run_replication(spec, prior, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (r < failed_at) {
          failed_at = r;
          failure = std::current_exception();
        }
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw NumericalError("sim cell replication " + std::to_string(failed_at) + " failed: " + e.what());
    }
  }
  return aggregate_cell(spec.true_params, spec.n, std::move(outcomes));
}

std::vector<SimCellResult> run_grid(std::vector<SimCellSpec> grid, std::uint64_t master_seed,
                                    const JointPriorSpec& prior, unsigned max_threads) {
  std::vector<SimCellResult> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i].sampler_cfg.seed = derive_seed(master_seed, i);
    out.push_back(run_cell(grid[i], prior, max_threads));
  }
  return out;
}

}  // namespace astbayes
