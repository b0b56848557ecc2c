#include "astbayes/cli.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "astbayes/diagnostics.hpp"
#include "astbayes/errors.hpp"
#include "astbayes/io.hpp"
#include "astbayes/priors.hpp"
#include "astbayes/seeding.hpp"
#include "astbayes/sim_study.hpp"

namespace astbayes::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_stats_row(std::string_view source, const DescriptiveStats& s) {
  return fmt::format("{},{:.10g},{:.10g},{:.10g}\n", source, s.mean, s.std_dev, s.skewness);
}

void print_stats(std::ostream& log, std::string_view what, std::size_t n, const DescriptiveStats& s) {
  log << fmt::format("{}: n={} mean={:.4f} sd={:.4f} skewness={:.4f}\n", what, n, s.mean, s.std_dev, s.skewness);
}

// Evenly spaced subset of at most `cap` draws, keeping the first.
Trace thin_to(const Trace& t, std::size_t cap) {
  if (t.size() <= cap) return t;
  Trace out;
  out.seed = t.seed;
  const double step = static_cast<double>(t.size()) / static_cast<double>(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    const auto i = static_cast<std::size_t>(static_cast<double>(k) * step);
    out.alpha.push_back(t.alpha[i]);
    out.mu.push_back(t.mu[i]);
    out.sigma.push_back(t.sigma[i]);
    out.nu.push_back(t.nu[i]);
  }
  return out;
}

struct PredictiveOutputs {
  PredictiveDensity density;
  DescriptiveStats moments;
};

// Grid covers the central 99% of predictive draws (and the data, if any), padded by 5%.
PredictiveOutputs predictive_outputs(const Trace& pooled, const RunConfig& cfg, const std::vector<double>* data) {
  const std::uint64_t seed = derive_seed(cfg.master_seed(), 0xbeef);
  PredictiveOutputs out;
  out.moments = predictive_moments(pooled, seed);

  const Trace mix = thin_to(pooled, cfg.max_predictive_draws);
  double lo = 0.0;
  double hi = 0.0;
  {
    std::vector<double> sims;
    sims.reserve(pooled.size());
    for (std::size_t s = 0; s < pooled.size(); ++s) {
      sims.push_back(ast_sample(pooled.draw(s), 1, derive_seed(seed, s)).values[0]);
    }
    lo = quantile_type1(sims, 0.005);
    hi = quantile_type1(sims, 0.995);
  }
  if (data != nullptr && !data->empty()) {
    lo = std::min(lo, *std::min_element(data->begin(), data->end()));
    hi = std::max(hi, *std::max_element(data->begin(), data->end()));
  }
  const double pad = 0.05 * (hi - lo);
  lo = cfg.grid_min.value_or(lo - pad);
  hi = cfg.grid_max.value_or(hi + pad);
  out.density = posterior_predictive(mix, linear_grid(lo, hi, cfg.grid_points));
  return out;
}

std::string acceptance_table(const std::vector<Trace>& traces) {
  std::string out = "chain,seed,nu,mu,sigma,alpha,alpha_auto_rejects,s_mu,a_sigma,b_sigma,v_alpha\n";
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const Trace& t = traces[k];
    const auto& r = t.acceptance_rates;
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{:.10g},{:.10g},{:.10g},{:.10g}\n", k, t.seed, r[0], r[1],
                       r[2], r[3], t.alpha_auto_rejects, t.tuning.s_mu, t.tuning.a_sigma, t.tuning.b_sigma,
                       t.tuning.v_alpha);
  }
  return out;
}

template <class T>
void opt_line(std::string& out, const char* key, const std::optional<T>& v) {
  if (v) out += fmt::format("{}={}\n", key, *v);
}

void write_manifest(const RunConfig& cfg, Clock::time_point start) {
  io::write_file(cfg.output_dir / "manifest.toml", manifest_text(cfg, seconds_since(start)));
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> known{"fit", "simulate", "prior-table", "sim-study", "predictive"};
  if (std::find(known.begin(), known.end(), subcommand) == known.end()) {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  if ((subcommand == "fit" || subcommand == "predictive") && !input_path) {
    throw ConfigError(subcommand + " requires --input");
  }
  if (input_path && !fs::is_regular_file(*input_path)) throw ConfigError("input file not found: " + input_path->string());
  if (subcommand == "sim-study") {
    if (!grid_config) throw ConfigError("sim-study requires --grid-config");
    if (!fs::is_regular_file(*grid_config)) throw ConfigError("grid config not found: " + grid_config->string());
  }
  if (output_dir.empty()) throw ConfigError("--out must not be empty");
  if (fs::exists(output_dir) && !fs::is_directory(output_dir)) {
    throw ConfigError("--out exists and is not a directory: " + output_dir.string());
  }
  if (grid_points < 2) throw ConfigError("--grid-points must be at least 2");
  if (grid_min && grid_max && !(*grid_max > *grid_min)) throw ConfigError("--grid-max must exceed --grid-min");
  if (max_predictive_draws == 0) throw ConfigError("--predictive-draws must be positive");
  try {
    if (subcommand == "fit" || subcommand == "sim-study") sampler_cfg.validate();
    if (subcommand == "simulate") {
      true_params.validate();
      if (n == 0) throw ConfigError("--n must be positive");
    }
    if (subcommand == "prior-table" && !(quad_tol > 0.0 && quad_tol <= 1e-4)) {
      throw ConfigError("--quad-tol must lie in (0, 1e-4]");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig default_fit_config() {
  RunConfig cfg;
  cfg.subcommand = "fit";
  cfg.sampler_cfg.n_chains = 4;
  cfg.sampler_cfg.iterations = 50000;
  cfg.sampler_cfg.burn_in = 10000;
  return cfg;
}

std::string manifest_text(const RunConfig& cfg, double wall_seconds) {
  const SamplerConfig& s = cfg.sampler_cfg;
  std::string out = fmt::format("# ast_bayes run manifest; rerun with: ast_bayes --manifest <this file> {} --out <dir>\n",
                                cfg.subcommand);
  out += fmt::format("# wall_time_seconds = {:.3f}\n", wall_seconds);
  out += fmt::format("[{}]\n", cfg.subcommand);
  out += fmt::format("seed={}\n", s.seed);
  if (cfg.subcommand == "fit" || cfg.subcommand == "predictive") {
    out += fmt::format("input=\"{}\"\n", fs::absolute(*cfg.input_path).string());
  }
  if (cfg.subcommand == "fit") {
    out += fmt::format("log-transform={}\n", cfg.log_transform);
    out += fmt::format("gr-threshold={}\n", cfg.gr_threshold);
  }
  if (cfg.subcommand == "fit") out += fmt::format("iterations={}\nburn-in={}\nthin={}\n", s.iterations, s.burn_in, s.thin);
  if (cfg.subcommand == "fit" || cfg.subcommand == "sim-study") {
    opt_line(out, "s-mu", s.s_mu);
    opt_line(out, "a-sigma", s.a_sigma);
    opt_line(out, "b-sigma", s.b_sigma);
    opt_line(out, "v-alpha", s.v_alpha);
    out += fmt::format("no-adapt={}\n", !s.adapt);
  }
  if (cfg.subcommand == "fit") out += fmt::format("chains={}\n", s.n_chains);
  if (cfg.subcommand == "fit" || cfg.subcommand == "predictive") {
    out += fmt::format("grid-points={}\npredictive-draws={}\n", cfg.grid_points, cfg.max_predictive_draws);
    opt_line(out, "grid-min", cfg.grid_min);
    opt_line(out, "grid-max", cfg.grid_max);
  }
  if (cfg.subcommand == "simulate") {
    const ASTParams& p = cfg.true_params;
    out += fmt::format("alpha={}\nnu={}\nmu={}\nsigma={}\nn={}\n", p.alpha, p.nu, p.mu, p.sigma, cfg.n);
  }
  if (cfg.subcommand == "prior-table") out += fmt::format("quad-tol={}\n", cfg.quad_tol);
  if (cfg.subcommand == "sim-study") {
    out += fmt::format("grid-config=\"{}\"\n", fs::absolute(cfg.output_dir / "grid_config.txt").string());
    out += fmt::format("threads={}\n", cfg.threads);
  }
  return out;
}

int cmd_fit(const RunConfig& cfg, std::ostream& log) {
  const auto start = Clock::now();
  cfg.validate();
  const Sample data = io::ingest(*cfg.input_path, cfg.log_transform);
  const DescriptiveStats data_stats = descriptive_stats(data);
  print_stats(log, cfg.log_transform ? "data (log scale)" : "data", data.size(), data_stats);

  const JointPriorSpec prior;
  const auto inits = default_inits(data.values, cfg.sampler_cfg.n_chains, cfg.master_seed());
  const std::vector<Trace> traces = run_chains(data, cfg.sampler_cfg, prior, inits);
  const Trace pooled = pool(traces);
  const PosteriorSummary summary = summarize(pooled);

  bool breached = false;
  std::string psrf_table = "parameter,psrf\n";
  if (traces.size() >= 2) {
    for (Parameter p : kAllParameters) {
      double r = 0.0;
      try {
        r = gelman_rubin(traces, p);
      } catch (const NumericalError&) {
        // Zero within-chain variance: fine only if every chain sits on the same value.
        const auto first = draws(traces.front(), p).front();
        bool same = true;
        for (const Trace& t : traces) {
          for (double x : draws(t, p)) same = same && x == first;
        }
        r = same ? 1.0 : std::numeric_limits<double>::infinity();
      }
      psrf_table += fmt::format("{},{:.6f}\n", parameter_name(p), r);
      if (!(r < cfg.gr_threshold)) {
        breached = true;
        log << fmt::format("warning: Gelman-Rubin for {} is {:.4f} (threshold {})\n", parameter_name(p), r,
                           cfg.gr_threshold);
      }
    }
  } else {
    log << "note: single chain, Gelman-Rubin not computed\n";
  }

  const PredictiveOutputs pred = predictive_outputs(pooled, cfg, &data.values);
  print_stats(log, "posterior predictive", pooled.size(), pred.moments);

  const fs::path& dir = cfg.output_dir;
  io::write_file(dir / "summary.csv", io::format_summary(summary));
  for (std::size_t k = 0; k < traces.size(); ++k) {
    io::write_file(dir / fmt::format("trace_chain{}.csv", k), io::format_trace(traces[k]));
  }
  io::write_file(dir / "predictive.csv", io::format_predictive(pred.density));
  io::write_file(dir / "descriptive.csv", "source,mean,std_dev,skewness\n" + format_stats_row("data", data_stats) +
                                               format_stats_row("predictive", pred.moments));
  io::write_file(dir / "gelman_rubin.csv", psrf_table);
  io::write_file(dir / "acceptance.csv", acceptance_table(traces));
  write_manifest(cfg, start);

  log << io::format_summary(summary);
  return breached ? kDiagnostic : kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const auto start = Clock::now();
  cfg.validate();
  const Sample s = ast_sample(cfg.true_params, cfg.n, cfg.master_seed());
  io::write_file(cfg.output_dir / "data.txt", io::format_sample(s));
  write_manifest(cfg, start);
  log << fmt::format("wrote {} draws to {}\n", s.size(), (cfg.output_dir / "data.txt").string());
  return kOk;
}

int cmd_prior_table(const RunConfig& cfg, std::ostream& log) {
  const auto start = Clock::now();
  cfg.validate();
  const NuPriorTable table = build_prior_table(cfg.quad_tol);
  io::write_file(cfg.output_dir / "prior_table.csv", io::format_prior_table(table));
  write_manifest(cfg, start);
  log << io::format_prior_table(table);
  return kOk;
}

int cmd_sim_study(const RunConfig& cfg, std::ostream& log) {
  const auto start = Clock::now();
  cfg.validate();
  const std::string grid_text = io::read_file(*cfg.grid_config);
  std::vector<SimCellSpec> grid = io::parse_grid_config(grid_text);
  for (auto& cell : grid) {
    // Sampler settings from the command line win over the grid file.
    cell.sampler_cfg.s_mu = cfg.sampler_cfg.s_mu;
    cell.sampler_cfg.a_sigma = cfg.sampler_cfg.a_sigma;
    cell.sampler_cfg.b_sigma = cfg.sampler_cfg.b_sigma;
    cell.sampler_cfg.v_alpha = cfg.sampler_cfg.v_alpha;
    cell.sampler_cfg.adapt = cfg.sampler_cfg.adapt;
  }
  const JointPriorSpec prior;
  const auto results = run_grid(grid, cfg.master_seed(), prior, cfg.threads);

  std::string reps = "cell,replication,median,ci_low,ci_high\n";
  for (std::size_t c = 0; c < results.size(); ++c) {
    for (std::size_t r = 0; r < results[c].replications.size(); ++r) {
      const auto& o = results[c].replications[r];
      reps += fmt::format("{},{},{},{},{}\n", c, r, o.median, o.ci_low, o.ci_high);
    }
  }
  io::write_file(cfg.output_dir / "sim_study.csv", io::format_sim_results(results));
  io::write_file(cfg.output_dir / "replications.csv", reps);
  // The manifest points at this copy so a rerun does not depend on the original file.
  if (!fs::exists(cfg.output_dir / "grid_config.txt") ||
      !fs::equivalent(*cfg.grid_config, cfg.output_dir / "grid_config.txt")) {
    io::write_file(cfg.output_dir / "grid_config.txt", grid_text);
  }
  write_manifest(cfg, start);
  log << io::format_sim_results(results);
  return kOk;
}

int cmd_predictive(const RunConfig& cfg, std::ostream& log) {
  const auto start = Clock::now();
  cfg.validate();
  const Trace trace = io::parse_trace(io::read_file(*cfg.input_path));
  if (trace.size() == 0) throw DomainError("trace file holds no draws");
  const PredictiveOutputs pred = predictive_outputs(trace, cfg, nullptr);
  io::write_file(cfg.output_dir / "predictive.csv", io::format_predictive(pred.density));
  io::write_file(cfg.output_dir / "descriptive.csv",
                 "source,mean,std_dev,skewness\n" + format_stats_row("predictive", pred.moments));
  write_manifest(cfg, start);
  print_stats(log, "posterior predictive", trace.size(), pred.moments);
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Objective Bayesian inference for the asymmetric Student-t model"};
  app.require_subcommand(1);
  app.set_config("--manifest", "", "Reload every setting of a previous run from its manifest.toml");

  RunConfig cfg = default_fit_config();
  std::string input;
  std::string grid_config;
  std::string output = "out";
  SamplerConfig& s = cfg.sampler_cfg;
  ASTParams& truth = cfg.true_params;
  bool no_adapt = false;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", output, "Output directory")->capture_default_str();
    sub->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  };
  const auto schedule_opts = [&](CLI::App* sub) {
    sub->add_option("--iterations", s.iterations, "Total iterations per chain, burn-in included")->capture_default_str();
    sub->add_option("--burn-in", s.burn_in, "Discarded leading iterations")->capture_default_str();
    sub->add_option("--thin", s.thin, "Keep every k-th post-burn-in draw")->capture_default_str();
  };
  const auto proposal_opts = [&](CLI::App* sub) {
    sub->add_option("--s-mu", s.s_mu, "Random-walk standard deviation for mu (default: tuned)");
    sub->add_option("--a-sigma", s.a_sigma, "Gamma proposal shape for sigma (default: tuned)");
    sub->add_option("--b-sigma", s.b_sigma, "Gamma proposal rate for sigma (default: tuned)");
    sub->add_option("--v-alpha", s.v_alpha, "Beta proposal variance for alpha (default: tuned)");
    sub->add_flag("--no-adapt", no_adapt, "Keep pilot proposal constants through burn-in");
  };
  const auto grid_opts = [&](CLI::App* sub) {
    sub->add_option("--grid-points", cfg.grid_points, "Predictive density grid size")->capture_default_str();
    sub->add_option("--grid-min", cfg.grid_min, "Predictive grid lower end");
    sub->add_option("--grid-max", cfg.grid_max, "Predictive grid upper end");
    sub->add_option("--predictive-draws", cfg.max_predictive_draws, "Posterior draws mixed into the density")
        ->capture_default_str();
  };

  auto* fit = app.add_subcommand("fit", "Fit the AST model to a data file");
  common(fit);
  schedule_opts(fit);
  proposal_opts(fit);
  grid_opts(fit);
  fit->add_option("--input", input, "Data file, one value per line");
  fit->add_flag("--log-transform", cfg.log_transform, "Model the natural log of the data");
  fit->add_option("--chains", s.n_chains, "Number of chains")->capture_default_str();
  fit->add_option("--gr-threshold", cfg.gr_threshold, "Gelman-Rubin warning threshold")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Draw a data set from the AST model");
  common(simulate);
  simulate->add_option("--alpha", truth.alpha)->capture_default_str();
  simulate->add_option("--nu", truth.nu)->capture_default_str();
  simulate->add_option("--mu", truth.mu)->capture_default_str();
  simulate->add_option("--sigma", truth.sigma)->capture_default_str();
  simulate->add_option("--n", cfg.n, "Number of draws")->capture_default_str();

  auto* prior = app.add_subcommand("prior-table", "Tabulate the objective prior for nu");
  common(prior);
  prior->add_option("--quad-tol", cfg.quad_tol, "Quadrature tolerance")->capture_default_str();

  auto* study = app.add_subcommand("sim-study", "Repeated-sampling study of the posterior for nu");
  common(study);
  proposal_opts(study);
  study->add_option("--grid-config", grid_config, "Study grid, key = value text (holds iterations and burn_in)");
  study->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* predictive = app.add_subcommand("predictive", "Posterior predictive density from a trace file");
  common(predictive);
  grid_opts(predictive);
  predictive->add_option("--input", input, "Trace file written by fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  if (!input.empty()) cfg.input_path = input;
  if (!grid_config.empty()) cfg.grid_config = grid_config;
  cfg.output_dir = output;
  s.adapt = !no_adapt;
  if (cfg.subcommand != "fit") s.n_chains = 1;

  try {
    if (cfg.subcommand == "fit") return cmd_fit(cfg, out);
    if (cfg.subcommand == "simulate") return cmd_simulate(cfg, out);
    if (cfg.subcommand == "prior-table") return cmd_prior_table(cfg, out);
    if (cfg.subcommand == "sim-study") return cmd_sim_study(cfg, out);
    return cmd_predictive(cfg, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace astbayes::cli
