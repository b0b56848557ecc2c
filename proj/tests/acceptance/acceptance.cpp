// Acceptance suite. `acceptance N` runs criterion N; with no argument every
// criterion except the slow study (5) runs. Each criterion prints one line:
//   criterion N: PASS|FAIL|SKIP <name> (<detail>)
// Exit status: 0 pass, 1 fail, 77 skipped.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "astbayes/cli.hpp"
#include "astbayes/diagnostics.hpp"
#include "astbayes/io.hpp"
#include "astbayes/nu_prior.hpp"
#include "astbayes/priors.hpp"
#include "astbayes/sampler.hpp"
#include "astbayes/seeding.hpp"
#include "astbayes/sim_study.hpp"
#include "oracle/kl_oracle.hpp"

using namespace astbayes;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

const JointPriorSpec& joint_prior() {
  static const JointPriorSpec spec;
  return spec;
}

// 1. The neighbour divergence does not depend on alpha.
Outcome alpha_invariance() {
  constexpr double kTol = 1e-7;
  double worst = 0.0;
  int worst_nu = 0;
  double worst_alpha = 0.0;
  for (int nu = 1; nu <= 29; ++nu) {
    const double ref = kl_divergence({0.5, nu, 0.0, 1.0}, {0.5, nu + 1, 0.0, 1.0});
    for (double a : {0.1, 0.3, 0.5, 0.8}) {
      const double d = std::abs(kl_divergence({a, nu, 0.0, 1.0}, {a, nu + 1, 0.0, 1.0}) - ref);
      if (d > worst) {
        worst = d;
        worst_nu = nu;
        worst_alpha = a;
      }
    }
  }
  return verdict(worst < kTol, fmt::format("max |D_alpha - D_0.5| = {:.3e} at nu={} alpha={}, tol {:.0e}", worst,
                                           worst_nu, worst_alpha, kTol));
}

// 2. Prior masses against the fixed-grid Simpson oracle.
Outcome prior_oracle() {
  const NuPriorTable& lib = default_prior_table();
  const oracle::PriorTable ref = oracle::prior_table();
  double worst = 0.0;
  for (int nu = kNuMin; nu <= kNuMax; ++nu) worst = std::max(worst, std::abs(lib.mass(nu) - ref.mass[nu - 1]));
  const double total = std::accumulate(lib.masses.begin(), lib.masses.end(), 0.0);
  const bool ok = worst < 1e-7 && std::abs(total - 1.0) < 1e-12;
  return verdict(ok, fmt::format("max mass error {:.3e} (tol 1e-7), |sum - 1| = {:.1e} (tol 1e-12)", worst,
                                 std::abs(total - 1.0)));
}

// 3. Total mass and left mass by double-exponential quadrature on each half line.
Outcome normalization() {
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst_total = 0.0;
  double worst_left = 0.0;
  for (double a : {0.05, 0.3, 0.5, 0.8, 0.95}) {
    for (int nu : {1, 2, 5, 10, 29, 30}) {
      const ASTParams p{a, nu, 0.7, 1.3};
      const double left = integrator.integrate([&](double t) { return ast_pdf(p.mu - t, p); }, 1e-14);
      const double right = integrator.integrate([&](double t) { return ast_pdf(p.mu + t, p); }, 1e-14);
      worst_total = std::max(worst_total, std::abs(left + right - 1.0));
      worst_left = std::max(worst_left, std::abs(left - a));
    }
  }
  return verdict(worst_total < 1e-8 && worst_left < 1e-8,
                 fmt::format("max |mass - 1| = {:.2e}, max |left mass - alpha| = {:.2e}, tol 1e-8", worst_total,
                             worst_left));
}

// 4. Recovery of (0.35, 6, 2, 1.5) from n = 200 across ten seeds.
Outcome single_sample_recovery() {
  const ASTParams truth{0.35, 6, 2.0, 1.5};
  constexpr std::uint64_t kBase = 20240601;
  int passes = 0;
  std::string failures;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Sample data = ast_sample(truth, 200, derive_seed(kBase, 2 * k));
    SamplerConfig cfg;
    cfg.iterations = 100000;
    cfg.burn_in = 5000;
    cfg.seed = derive_seed(kBase, 2 * k + 1);
    const PosteriorSummary s = summarize(run_chain(data, cfg, joint_prior(), default_init(data.values)));
    const auto inside = [](const ParameterSummary& p, double v) { return p.ci_low <= v && v <= p.ci_high; };
    const bool ok = inside(s.alpha, truth.alpha) && inside(s.mu, truth.mu) && inside(s.sigma, truth.sigma) &&
                    inside(s.nu, truth.nu) && s.nu.median >= 4 && s.nu.median <= 9 &&
                    std::abs(s.alpha.mean - truth.alpha) < 0.1;
    if (ok) {
      ++passes;
    } else {
      failures += fmt::format(" seed{}[alpha {:.3f} ({:.3f},{:.3f}) nu med {} ({},{})]", k, s.alpha.mean,
                              s.alpha.ci_low, s.alpha.ci_high, s.nu.median, s.nu.ci_low, s.nu.ci_high);
    }
  }
  return verdict(passes >= 9, fmt::format("{}/10 seeds recovered, need 9{}", passes, failures));
}

// 5. Repeated-sampling study at n = 1000.
Outcome desk_study() {
  std::vector<SimCellSpec> grid;
  for (int nu : {1, 3}) {
    for (double a : {0.3, 0.5}) {
      SimCellSpec c;
      c.true_params = {a, nu, 0.0, 1.0};
      c.n = 1000;
      c.replications = 100;
      c.sampler_cfg.iterations = 20000;
      c.sampler_cfg.burn_in = 2000;
      grid.push_back(c);
    }
  }
  const auto results = run_grid(grid, 19920101, joint_prior());
  bool ok = true;
  std::string detail;
  for (const auto& r : results) {
    const auto ci = r.median_ci;
    const bool ci_ok = r.true_params.nu == 1 ? ci == std::make_pair(1, 1)
                                             : (ci == std::make_pair(3, 3) || ci == std::make_pair(2, 3) ||
                                                ci == std::make_pair(3, 4));
    ok = ok && ci_ok && r.coverage >= 0.80;
    detail += fmt::format("{}nu={} alpha={}: median CI ({},{}) coverage {:.2f} rel_rmse {:.3f}",
                          detail.empty() ? "" : "; ", r.true_params.nu, r.true_params.alpha, ci.first, ci.second,
                          r.coverage, r.rel_rmse);
  }
  return verdict(ok, detail);
}

// 6. Alpha-only chain against the posterior normalised by quadrature.
Outcome alpha_stationarity() {
  const ASTParams fixed{0.35, 4, 0.0, 1.0};
  const Sample data = ast_sample(fixed, 20, 77);
  const auto log_target = [&](double a) {
    ASTParams p = fixed;
    p.alpha = a;
    return ast_log_likelihood(data.values, p) + log_alpha_prior(a);
  };
  double peak = -INFINITY;
  for (int i = 1; i < 1000; ++i) peak = std::max(peak, log_target(i / 1000.0));

  constexpr int kBins = 20;
  boost::math::quadrature::tanh_sinh<double> integrator;
  std::vector<double> exact(kBins);
  for (int b = 0; b < kBins; ++b) {
    exact[b] = integrator.integrate([&](double a) { return std::exp(log_target(a) - peak); }, b / double(kBins),
                                    (b + 1) / double(kBins));
  }
  const double z = std::accumulate(exact.begin(), exact.end(), 0.0);
  for (double& e : exact) e /= z;

  SamplerConfig cfg;
  cfg.iterations = 410000;
  cfg.burn_in = 10000;
  cfg.seed = 6;
  cfg.update_block = {false, false, false, true};
  ASTParams init = fixed;
  init.alpha = 0.5;
  const Trace t = run_chain(data, cfg, joint_prior(), init);

  std::vector<double> hist(kBins, 0.0);
  for (double a : t.alpha) hist[std::min(kBins - 1, static_cast<int>(a * kBins))] += 1.0;
  double tv = 0.0;
  for (int b = 0; b < kBins; ++b) tv += std::abs(hist[b] / static_cast<double>(t.size()) - exact[b]);
  tv *= 0.5;
  return verdict(tv < 0.02, fmt::format("total variation {:.4f} over {} bins from {} draws (acceptance {:.2f}), tol 0.02",
                                        tv, kBins, t.size(), t.acceptance_rates[3]));
}

// 7. Real-data fits, only when the data files are supplied.
std::optional<fs::path> dataset(const char* env, const char* file) {
  if (const char* p = std::getenv(env); p != nullptr && fs::is_regular_file(p)) return fs::path(p);
  const fs::path bundled = fs::path(ASTBAYES_TEST_DATA_DIR) / file;
  if (fs::is_regular_file(bundled)) return bundled;
  return std::nullopt;
}

struct Fit {
  PosteriorSummary summary;
  DescriptiveStats predictive;
};

Fit fit_log_data(const fs::path& path) {
  const Sample data = io::ingest(path, true);
  SamplerConfig cfg;
  cfg.iterations = 50000;
  cfg.burn_in = 10000;
  cfg.n_chains = 4;
  cfg.seed = 2019;
  const auto traces = run_chains(data, cfg, joint_prior(), default_inits(data.values, cfg.n_chains, cfg.seed));
  const Trace pooled = pool(traces);
  return {summarize(pooled), predictive_moments(pooled, derive_seed(cfg.seed, 0xbeef))};
}

Outcome real_data() {
  const auto danish = dataset("ASTBAYES_DANISH_DATA", "danish.txt");
  const auto us = dataset("ASTBAYES_US_DATA", "us_losses.txt");
  if (!danish && !us) {
    return {Status::Skip, "set ASTBAYES_DANISH_DATA and ASTBAYES_US_DATA to the loss files to run"};
  }
  bool ok = true;
  std::string detail;
  if (danish) {
    const Fit f = fit_log_data(*danish);
    const DescriptiveStats& p = f.predictive;
    const bool d_ok = f.summary.nu.median >= 8 && f.summary.nu.median <= 12 && f.summary.alpha.mean < 0.01 &&
                      std::abs(p.mean - 0.79) <= 0.05 && std::abs(p.std_dev - 0.72) <= 0.05 &&
                      std::abs(p.skewness - 1.77) <= 0.05;
    ok = ok && d_ok;
    detail += fmt::format("danish: nu median {} alpha mean {:.4f} predictive ({:.3f}, {:.3f}, {:.3f})",
                          f.summary.nu.median, f.summary.alpha.mean, p.mean, p.std_dev, p.skewness);
  } else {
    detail += "danish: absent";
  }
  if (us) {
    const Fit f = fit_log_data(*us);
    const bool u_ok = f.summary.alpha.ci_low <= 0.5 && 0.5 <= f.summary.alpha.ci_high && f.summary.nu.median >= 21;
    ok = ok && u_ok;
    detail += fmt::format("; us: alpha CI ({:.3f}, {:.3f}) nu median {}", f.summary.alpha.ci_low,
                          f.summary.alpha.ci_high, f.summary.nu.median);
  } else {
    detail += "; us: absent";
  }
  return verdict(ok, detail);
}

// 8. Every subcommand rerun from its manifest gives identical output files.
int invoke(std::vector<std::string> args, std::string& log) {
  args.insert(args.begin(), "ast_bayes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  log = err.str();
  return code;
}

// Names of differing or missing files, manifest excluded since it records wall time.
std::vector<std::string> differing_outputs(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diffs;
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.toml") continue;
    ++compared;
    if (!fs::exists(b / name) || io::read_file(entry.path()) != io::read_file(b / name)) diffs.push_back(name);
  }
  if (compared == 0) diffs.push_back("<no outputs>");
  return diffs;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "astbayes_acceptance_c8";
  fs::remove_all(root);
  fs::create_directories(root);
  io::write_file(root / "grid.txt",
                 "nu = 2\nalpha = 0.4\nn = 60\nreplications = 3\niterations = 2000\nburn_in = 400\n");

  struct Case {
    std::string name;
    std::vector<std::string> args;
  };
  const std::vector<Case> cases{
      {"simulate", {"simulate", "--n", "300", "--seed", "11"}},
      {"prior-table", {"prior-table"}},
      {"fit",
       {"fit", "--input", (root / "simulate" / "data.txt").string(), "--iterations", "6000", "--burn-in", "1000",
        "--chains", "3", "--seed", "12", "--grid-points", "128"}},
      {"predictive", {"predictive", "--input", (root / "fit" / "trace_chain0.csv").string(), "--seed", "13"}},
      {"sim-study", {"sim-study", "--grid-config", (root / "grid.txt").string(), "--seed", "14"}},
  };

  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    std::string log;
    auto args = c.args;
    args.insert(args.end(), {"--out", (root / c.name).string()});
    const int first = invoke(args, log);
    const int second = invoke(
        {"--manifest", (root / c.name / "manifest.toml").string(), c.name, "--out", (root / (c.name + "_rerun")).string()},
        log);
    const bool ran = (first == cli::kOk || first == cli::kDiagnostic) && second == first;
    const auto diffs = ran ? differing_outputs(root / c.name, root / (c.name + "_rerun")) : std::vector<std::string>{};
    const bool same = ran && diffs.empty();
    ok = ok && same;
    std::string note = same ? "identical" : ran ? "differs in" : fmt::format("exit {} then {}", first, second);
    for (const auto& d : diffs) note += " " + d;
    detail += fmt::format("{}{}: {}", detail.empty() ? "" : "; ", c.name, note);
  }
  return verdict(ok, detail);
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "alpha-invariance of neighbour KL", alpha_invariance},
      {2, "prior table vs quadrature oracle", prior_oracle},
      {3, "density normalization and left mass", normalization},
      {4, "single-sample recovery", single_sample_recovery},
      {5, "desk-scale repeated-sampling study", desk_study},
      {6, "alpha-block stationarity", alpha_stationarity},
      {7, "real-data reproduction", real_data},
      {8, "manifest rerun determinism", determinism},
  };
  return all;
}

Status run_one(const Criterion& c) {
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {Status::Fail, std::string("exception: ") + e.what()};
  }
  const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
  std::cout << fmt::format("criterion {}: {} {} ({})", c.id, tag, c.name, o.detail) << std::endl;
  return o.status;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  } else {
    selected = {1, 2, 3, 4, 6, 7, 8};
  }
  bool failed = false;
  bool all_skipped = true;
  for (int id : selected) {
    const auto it = std::find_if(criteria().begin(), criteria().end(), [&](const Criterion& c) { return c.id == id; });
    if (it == criteria().end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const Status s = run_one(*it);
    failed = failed || s == Status::Fail;
    all_skipped = all_skipped && s == Status::Skip;
  }
  if (failed) return 1;
  return all_skipped ? 77 : 0;
}
