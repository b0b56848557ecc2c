#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "astbayes/ast.hpp"
#include "astbayes/nu_prior.hpp"
#include "astbayes/sampler.hpp"

namespace astbayes::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,       // unparseable or out-of-domain data
  kNumerical = 4,   // quadrature or sampler failure
  kDiagnostic = 5,  // Gelman-Rubin threshold breached; outputs still written
  kIo = 6,
};

struct RunConfig {
  std::string subcommand;
  std::optional<fs::path> input_path;
  bool log_transform = false;
  SamplerConfig sampler_cfg;  // sampler_cfg.seed doubles as the master seed
  fs::path output_dir = "out";

  double gr_threshold = 1.1;

  // simulate
  ASTParams true_params{0.35, 6, 2.0, 1.5};
  std::size_t n = 200;

  // prior-table
  double quad_tol = kDefaultQuadTol;

  // sim-study
  std::optional<fs::path> grid_config;
  unsigned threads = 0;

  // predictive output
  std::size_t grid_points = 512;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t max_predictive_draws = 4000;

  std::uint64_t master_seed() const noexcept { return sampler_cfg.seed; }
  void validate() const;
};

/// Defaults for `fit`: 4 chains x 50000 iterations, 10000 burn-in.
RunConfig default_fit_config();

int cmd_fit(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_prior_table(const RunConfig& cfg, std::ostream& log);
int cmd_sim_study(const RunConfig& cfg, std::ostream& log);
int cmd_predictive(const RunConfig& cfg, std::ostream& log);

/// key = value text that `--manifest` reads back to reproduce the run.
std::string manifest_text(const RunConfig& cfg, double wall_seconds);

/// Parses argv and dispatches; never throws, maps failures to ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace astbayes::cli
