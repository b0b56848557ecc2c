#include "astbayes/nu_prior.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "astbayes/errors.hpp"

namespace astbayes {

namespace {

constexpr unsigned kMaxDepth = 30;
// e^-700 is below the smallest normal double, so the tail past s = 700 is zero.
constexpr double kTailSpan = 700.0;

// Integrand of D(p || q). Parameters are validated by the caller.
struct KlIntegrand {
  ASTParams p;
  ASTParams q;
  double log_norm_p;
  double log_norm_q;

  double log_f(double x, const ASTParams& r, double log_norm) const {
    const double z = branch_z(x, r);
    const double kernel = r.nu == kNuMax ? -0.5 * z * z : -0.5 * (r.nu + 1.0) * std::log1p(z * z / r.nu);
    return log_norm - std::log(r.sigma) + kernel;
  }

  double operator()(double x) const {
    const double lp = log_f(x, p, log_norm_p);
    const double fp = std::exp(lp);
    if (fp == 0.0) return 0.0;
    return fp * (lp - log_f(x, q, log_norm_q));
  }
};

// Adaptive Gauss-Kronrod with an absolute error target, split evenly between halves
// on every bisection. An absolute target keeps near-zero divergences from chasing a
// relative tolerance below rounding noise.
double gk_adapt(const auto& f, double a, double b, double abs_tol, unsigned depth, double& worst) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error);
  if (error <= abs_tol || depth == 0) {
    worst = std::max(worst, error / abs_tol);
    return value;
  }
  const double m = 0.5 * (a + b);
  return gk_adapt(f, a, m, abs_tol / 2, depth - 1, worst) + gk_adapt(f, m, b, abs_tol / 2, depth - 1, worst);
}

// Integral over consecutive panels [cuts[i], cuts[i+1]], sharing abs_tol evenly.
double gk(const auto& f, const std::vector<double>& cuts, double abs_tol, const char* where) {
  const double per_panel = abs_tol / static_cast<double>(cuts.size() - 1);
  double worst = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) value += gk_adapt(f, cuts[i], cuts[i + 1], per_panel, kMaxDepth, worst);
  if (!std::isfinite(value) || worst > 1.0) {
    throw NumericalError(std::string("KL quadrature did not converge on the ") + where + " piece, error " +
                             std::to_string(worst) + "x the target",
                         worst * abs_tol);
  }
  return value;
}

// Tail breakpoints in s = log z: 0, 1, 2, 4, ..., 512, then the cutoff.
const std::vector<double>& tail_cuts() {
  static const std::vector<double> cuts = [] {
    std::vector<double> c{0.0};
    for (double s = 1.0; s < kTailSpan; s *= 2.0) c.push_back(s);
    c.push_back(kTailSpan);
    return c;
  }();
  return cuts;
}

// Integral of f over one branch, x = mu + dir * width * z with z >= 0. The unit
// interval z in [0, 1] is integrated directly; the tail uses z = e^s, which turns
// the polynomial (log-weighted, for Cauchy) decay into exponential decay in s.
double integrate_branch(const KlIntegrand& f, double mu, double width, double dir, double quad_tol) {
  const auto in_z = [&](double z) { return f(mu + dir * width * z); };
  const auto in_s = [&](double s) {
    const double z = std::exp(s);
    return f(mu + dir * width * z) * z;
  };
  const double core = gk(in_z, {0.0, 0.5, 1.0}, quad_tol / (4 * width), "core");
  const double tail = gk(in_s, tail_cuts(), quad_tol / (4 * width), "tail");
  return width * (core + tail);
}

void check_tol(double quad_tol) {
  if (!(quad_tol > 0.0 && quad_tol <= 1e-4)) throw DomainError("quad_tol must lie in (0, 1e-4]");
}

}  // namespace

double NuPriorTable::mass(int nu) const {
  if (nu < kNuMin || nu > kNuMax) throw DomainError("nu out of range: " + std::to_string(nu));
  return masses[static_cast<std::size_t>(nu - 1)];
}

double NuPriorTable::kl_neighbor(int nu) const {
  if (nu < kNuMin || nu > kNuMax) throw DomainError("nu out of range: " + std::to_string(nu));
  return kl_neighbors[static_cast<std::size_t>(nu - 1)];
}

SplitDivergence kl_divergence_split(const ASTParams& p, const ASTParams& q, double quad_tol) {
  p.validate();
  q.validate();
  check_tol(quad_tol);
  if (p.mu != q.mu) throw DomainError("kl_divergence_split: p and q must share mu");

  const KlIntegrand f{p, q, log_normalizer(p.nu), log_normalizer(q.nu)};
  return {integrate_branch(f, p.mu, 2.0 * p.alpha * p.sigma, -1.0, quad_tol),
          integrate_branch(f, p.mu, 2.0 * (1.0 - p.alpha) * p.sigma, 1.0, quad_tol)};
}

double kl_divergence(const ASTParams& p, const ASTParams& q, double quad_tol) {
  if (p.mu == q.mu) return kl_divergence_split(p, q, quad_tol).total();

  // Different locations: split at both kinks, the middle piece is finite.
  p.validate();
  q.validate();
  check_tol(quad_tol);
  const KlIntegrand f{p, q, log_normalizer(p.nu), log_normalizer(q.nu)};
  const double lo = std::min(p.mu, q.mu);
  const double hi = std::max(p.mu, q.mu);
  const double scale = 2.0 * std::max(p.sigma, q.sigma);
  // Panels no wider than the scale so no mode between the kinks is skipped.
  const auto panels = static_cast<std::size_t>(std::min(1000.0, std::ceil((hi - lo) / scale)));
  std::vector<double> cuts;
  for (std::size_t i = 0; i <= panels; ++i) cuts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels));
  return integrate_branch(f, lo, scale, -1.0, quad_tol / 3) + gk(f, cuts, quad_tol / 3, "middle") +
         integrate_branch(f, hi, scale, 1.0, quad_tol / 3);
}

int prior_neighbor(int nu) {
  if (nu < kNuMin || nu > kNuMax) throw DomainError("nu out of range: " + std::to_string(nu));
  return nu < 29 ? nu + 1 : nu - 1;
}

double neighbor_divergence(int nu, double alpha, double mu, double sigma, double quad_tol) {
  const ASTParams p{alpha, nu, mu, sigma};
  const ASTParams q{alpha, prior_neighbor(nu), mu, sigma};
  return kl_divergence(p, q, quad_tol);
}

NuPriorTable build_prior_table(double quad_tol, double alpha, double mu, double sigma) {
  check_tol(quad_tol);

  NuPriorTable table;
  table.quad_tol = quad_tol;
  double total = 0.0;
  for (int nu = kNuMin; nu <= kNuMax; ++nu) {
    const double d = neighbor_divergence(nu, alpha, mu, sigma, quad_tol);
    if (!(d > 0.0)) {
      throw NumericalError("non-positive neighbor divergence at nu=" + std::to_string(nu), std::abs(d));
    }
    const auto i = static_cast<std::size_t>(nu - 1);
    table.kl_neighbors[i] = d;
    table.masses[i] = std::expm1(d);
    total += table.masses[i];
  }
  for (int nu = kNuMin + 1; nu <= 28; ++nu) {
    const auto i = static_cast<std::size_t>(nu - 1);
    if (!(table.kl_neighbors[i] < table.kl_neighbors[i - 1])) {
      throw NumericalError("forward neighbor divergence is not decreasing at nu=" + std::to_string(nu));
    }
  }
  for (double& m : table.masses) m /= total;
  return table;
}

const NuPriorTable& default_prior_table() {
  static const NuPriorTable table = build_prior_table(kDefaultQuadTol);
  return table;
}

double log_prior_nu(int nu, const NuPriorTable& table) { return std::log(table.mass(nu)); }

}  // namespace astbayes
