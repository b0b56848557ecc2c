#include "astbayes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <string>

#include "astbayes/errors.hpp"
#include "astbayes/seeding.hpp"

namespace astbayes {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return m;
}

// Retunes unset proposal constants from one burn-in window.
class BurnInTuner {
 public:
  BurnInTuner(const SamplerConfig& cfg) : cfg_(cfg), window_(std::max<std::size_t>(50, cfg.burn_in / 20)) {
    mu_.reserve(window_);
    sigma_.reserve(window_);
    alpha_.reserve(window_);
  }

  void observe(const ASTParams& s) {
    mu_.push_back(s.mu);
    sigma_.push_back(s.sigma);
    alpha_.push_back(s.alpha);
  }

  bool window_full() const noexcept { return mu_.size() >= window_; }

  void retune(ProposalTuning& t, const ASTParams& current) {
    if (!cfg_.s_mu) {
      const Moments m = moments(mu_);
      t.s_mu = m.sd > 0.0 ? 2.4 * m.sd : 0.5 * t.s_mu;
    }
    if (!cfg_.a_sigma && !cfg_.b_sigma) {
      const Moments m = moments(sigma_);
      const double prop_sd = m.sd > 0.0 ? 2.0 * m.sd : 0.5 * std::sqrt(t.a_sigma) / t.b_sigma;
      const double centre = m.sd > 0.0 ? m.mean : current.sigma;
      t.a_sigma = (centre / prop_sd) * (centre / prop_sd);
      t.b_sigma = centre / (prop_sd * prop_sd);
    }
    if (!cfg_.v_alpha) {
      const Moments m = moments(alpha_);
      double v = m.sd > 0.0 ? (2.4 * m.sd) * (2.4 * m.sd) : 0.25 * t.v_alpha;
      v = std::min(v, 0.25 * current.alpha * (1.0 - current.alpha));
      t.v_alpha = std::max(v, 1e-14);
    }
    mu_.clear();
    sigma_.clear();
    alpha_.clear();
  }

 private:
  const SamplerConfig& cfg_;
  std::size_t window_;
  std::vector<double> mu_;
  std::vector<double> sigma_;
  std::vector<double> alpha_;
};

}  // namespace

void SamplerConfig::validate() const {
  if (iterations == 0) throw DomainError("sampler: iterations must be positive");
  if (burn_in >= iterations) throw DomainError("sampler: burn_in must be smaller than iterations");
  if (n_chains == 0) throw DomainError("sampler: n_chains must be at least 1");
  if (thin == 0) throw DomainError("sampler: thin must be at least 1");
  if (s_mu && !(*s_mu > 0.0)) throw DomainError("sampler: s_mu must be positive");
  if (a_sigma && !(*a_sigma > 0.0)) throw DomainError("sampler: a_sigma must be positive");
  if (b_sigma && !(*b_sigma > 0.0)) throw DomainError("sampler: b_sigma must be positive");
  if (v_alpha && !(*v_alpha > 0.0 && *v_alpha < 0.25)) throw DomainError("sampler: v_alpha must lie in (0, 0.25)");
}

double robust_scale(std::span<const double> values) {
  if (values.empty()) throw DomainError("robust_scale: empty sample");
  std::vector<double> v(values.begin(), values.end());
  const double med = median_of(v);
  for (double& x : v) x = std::abs(x - med);
  double s = 1.4826 * median_of(v);
  if (s > 0.0) return s;
  s = moments(std::vector<double>(values.begin(), values.end())).sd;
  return s > 0.0 ? s : 1.0;
}

ProposalTuning initial_tuning(const SamplerConfig& cfg, std::span<const double> values) {
  const double s = robust_scale(values);
  ProposalTuning t;
  t.s_mu = cfg.s_mu.value_or(2.4 * s / std::sqrt(static_cast<double>(values.size())));
  // mean s, variance s^2 / 2
  t.a_sigma = cfg.a_sigma.value_or(2.0);
  t.b_sigma = cfg.b_sigma.value_or(2.0 / s);
  t.v_alpha = cfg.v_alpha.value_or(0.01);
  return t;
}

ASTParams default_init(std::span<const double> values) {
  if (values.empty()) throw DomainError("default_init: empty sample");
  return {0.5, 5, median_of(std::vector<double>(values.begin(), values.end())), robust_scale(values)};
}

std::vector<ASTParams> default_inits(std::span<const double> values, std::size_t n_chains, std::uint64_t seed) {
  const ASTParams centre = default_init(values);
  std::vector<ASTParams> out{centre};
  for (std::size_t k = 1; k < n_chains; ++k) {
    Rng rng(derive_seed(seed, 0x1000 + k));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ASTParams p;
    p.alpha = 0.5 + 0.35 * u(rng);
    p.mu = centre.mu + centre.sigma * u(rng);
    p.sigma = centre.sigma * std::exp(0.7 * u(rng));
    p.nu = std::uniform_int_distribution<int>(kNuMin, kNuMax)(rng);
    out.push_back(p);
  }
  return out;
}

int propose_nu(Rng& rng) { return std::uniform_int_distribution<int>(kNuMin, kNuMax)(rng); }

double propose_mu(double current, double s_mu, Rng& rng) {
  return current + s_mu * std::normal_distribution<double>(0.0, 1.0)(rng);
}

double propose_sigma(double a_sigma, double b_sigma, Rng& rng) {
  return std::gamma_distribution<double>(a_sigma, 1.0 / b_sigma)(rng);
}

std::optional<BetaShape> beta_moment_match(double mean, double variance) {
  if (!(mean > 0.0 && mean < 1.0) || !(variance > 0.0) || variance >= mean * (1.0 - mean)) return std::nullopt;
  BetaShape s;
  s.a = ((1.0 - mean) / variance - 1.0 / mean) * mean * mean;
  s.b = s.a * (1.0 / mean - 1.0);
  if (!(s.a > 0.0 && s.b > 0.0)) return std::nullopt;
  return s;
}

std::optional<double> propose_alpha(double current, double v_alpha, Rng& rng) {
  const auto shape = beta_moment_match(current, v_alpha);
  if (!shape) return std::nullopt;
  const double x = std::gamma_distribution<double>(shape->a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(shape->b, 1.0)(rng);
  const double draw = x / (x + y);
  if (!(draw > 0.0 && draw < 1.0)) return std::nullopt;
  return draw;
}

double log_normal_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_density(double x, const BetaShape& s) {
  return std::lgamma(s.a + s.b) - std::lgamma(s.a) - std::lgamma(s.b) + (s.a - 1.0) * std::log(x) +
         (s.b - 1.0) * std::log1p(-x);
}

double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio)) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double mu_proposal_log_correction(double current, double proposed, double s_mu) {
  return log_normal_density(current, proposed, s_mu) - log_normal_density(proposed, current, s_mu);
}

double sigma_proposal_log_correction(double current, double proposed, double a_sigma, double b_sigma) {
  return log_gamma_density(current, a_sigma, b_sigma) - log_gamma_density(proposed, a_sigma, b_sigma);
}

std::optional<double> alpha_proposal_log_correction(double current, double proposed, double v_alpha) {
  const auto forward = beta_moment_match(current, v_alpha);
  const auto reverse = beta_moment_match(proposed, v_alpha);
  if (!forward || !reverse) return std::nullopt;
  return log_beta_density(current, *reverse) - log_beta_density(proposed, *forward);
}

Trace run_chain(std::span<const double> values, const SamplerConfig& cfg, const JointPriorSpec& spec,
                const ASTParams& init) {
  cfg.validate();
  init.validate();
  if (values.empty()) throw DomainError("run_chain: empty sample");

  Trace trace;
  trace.seed = cfg.seed;
  const std::size_t keep = cfg.retained();
  trace.alpha.reserve(keep);
  trace.mu.reserve(keep);
  trace.sigma.reserve(keep);
  trace.nu.reserve(keep);

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ProposalTuning tuning = initial_tuning(cfg, values);
  BurnInTuner tuner(cfg);

  ASTParams state = init;
  double lp = log_posterior(values, state, spec);
  if (!std::isfinite(lp)) throw DomainError("run_chain: log-posterior is not finite at the initial state");

  std::array<std::size_t, 4> accepted{};
  std::size_t alpha_auto_rejects = 0;

  std::size_t it = 0;
  const auto mh_step = [&](const ASTParams& candidate, double log_correction) {
    const double lp_new = log_posterior(values, candidate, spec);
    const double log_u = std::log(unif(rng));
    if (log_u < lp_new - lp + log_correction) {
      state = candidate;
      lp = lp_new;
      return true;
    }
    return false;
  };

  try {
    for (; it < cfg.iterations; ++it) {
      const bool retained_phase = it >= cfg.burn_in;
      std::array<bool, 4> ok{};

      const auto& on = cfg.update_block;

      // 1. nu
      if (on[0]) {
        ASTParams cand = state;
        cand.nu = propose_nu(rng);
        ok[0] = mh_step(cand, 0.0);
      }
      // 2. mu
      if (on[1]) {
        ASTParams cand = state;
        cand.mu = propose_mu(state.mu, tuning.s_mu, rng);
        ok[1] = mh_step(cand, mu_proposal_log_correction(state.mu, cand.mu, tuning.s_mu));
      }
      // 3. sigma
      if (on[2]) {
        ASTParams cand = state;
        cand.sigma = propose_sigma(tuning.a_sigma, tuning.b_sigma, rng);
        if (cand.sigma > 0.0 && std::isfinite(cand.sigma)) {
          ok[2] = mh_step(cand,
                          sigma_proposal_log_correction(state.sigma, cand.sigma, tuning.a_sigma, tuning.b_sigma));
        }
      }
      // 4. alpha
      if (on[3]) {
        const auto proposed = propose_alpha(state.alpha, tuning.v_alpha, rng);
        const auto correction =
            proposed ? alpha_proposal_log_correction(state.alpha, *proposed, tuning.v_alpha) : std::nullopt;
        if (correction) {
          ASTParams cand = state;
          cand.alpha = *proposed;
          ok[3] = mh_step(cand, *correction);
        } else if (retained_phase) {
          ++alpha_auto_rejects;
        }
      }

      if (retained_phase) {
        for (std::size_t b = 0; b < 4; ++b) accepted[b] += ok[b] ? 1 : 0;
        if ((it - cfg.burn_in) % cfg.thin == 0) {
          trace.alpha.push_back(state.alpha);
          trace.mu.push_back(state.mu);
          trace.sigma.push_back(state.sigma);
          trace.nu.push_back(state.nu);
        }
      } else if (cfg.adapt) {
        tuner.observe(state);
        if (tuner.window_full()) tuner.retune(tuning, state);
      }
    }
  } catch (const DomainError& e) {
    throw DomainError("iteration " + std::to_string(it) + ": " + e.what());
  }

  const double n_kept_iters = static_cast<double>(cfg.iterations - cfg.burn_in);
  for (std::size_t b = 0; b < 4; ++b) trace.acceptance_rates[b] = static_cast<double>(accepted[b]) / n_kept_iters;
  trace.alpha_auto_rejects = alpha_auto_rejects;
  trace.tuning = tuning;
  return trace;
}

Trace run_chain(const Sample& s, const SamplerConfig& cfg, const JointPriorSpec& spec, const ASTParams& init) {
  s.validate();
  return run_chain(std::span<const double>(s.values), cfg, spec, init);
}

std::vector<Trace> run_chains(const Sample& s, const SamplerConfig& cfg, const JointPriorSpec& spec,
                              std::span<const ASTParams> inits) {
  s.validate();
  cfg.validate();
  if (inits.empty()) throw DomainError("run_chains: need at least one init");

  std::vector<std::future<Trace>> jobs;
  jobs.reserve(inits.size());
  for (std::size_t k = 0; k < inits.size(); ++k) {
    SamplerConfig chain_cfg = cfg;
    chain_cfg.seed = derive_seed(cfg.seed, k);
    jobs.push_back(std::async(std::launch::async, [&s, &spec, chain_cfg, init = inits[k]] {
      return run_chain(s, chain_cfg, spec, init);
    }));
  }
  std::vector<Trace> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace astbayes
