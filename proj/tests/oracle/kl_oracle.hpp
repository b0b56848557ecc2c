#pragma once

// Independent fixed-grid reference for neighbor KL divergences and the nu prior.
// Shares no code with the library: its own t / skew-normal densities, composite
// Simpson on a fixed grid, and an exponential map z = e^s for the tails.

#include <array>
#include <cmath>
#include <cstddef>

namespace oracle {

inline double log_std_density(double z, int nu) {
  constexpr double kPi = 3.14159265358979323846;
  if (nu >= 30) return -0.5 * z * z - 0.5 * std::log(2.0 * kPi);
  const double v = nu;
  return std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) - 0.5 * std::log(kPi * v) -
         (v + 1.0) / 2.0 * std::log(1.0 + z * z / v);
}

// Integrand of D(t_a || t_b) on the standardized half line z >= 0.
inline double half_integrand(double z, int nu_a, int nu_b) {
  const double la = log_std_density(z, nu_a);
  const double fa = std::exp(la);
  if (fa == 0.0) return 0.0;
  return fa * (la - log_std_density(z, nu_b));
}

template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    (i % 2 == 1 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

// Integral over z >= 0 of the standardized KL integrand with `nodes` total grid
// points: half on [0,1], half on s in [0,50] with z = e^s.
inline double half_divergence(int nu_a, int nu_b, std::size_t nodes = 1000000) {
  const std::size_t per = nodes / 2;
  const double core = simpson([&](double z) { return half_integrand(z, nu_a, nu_b); }, 0.0, 1.0, per);
  const double tail = simpson(
      [&](double s) {
        const double z = std::exp(s);
        return half_integrand(z, nu_a, nu_b) * z;
      },
      0.0, 50.0, per);
  return core + tail;
}

// D(f_a || f_b) for AST densities with common (alpha, mu, sigma): the left and
// right halves are the standardized half integrals scaled by 2 alpha and 2 (1 - alpha).
inline double divergence(int nu_a, int nu_b, double alpha = 0.5, std::size_t nodes = 1000000) {
  const double h = half_divergence(nu_a, nu_b, nodes);
  return 2.0 * alpha * h + 2.0 * (1.0 - alpha) * h;
}

struct PriorTable {
  std::array<double, 30> kl{};
  std::array<double, 30> mass{};
};

inline PriorTable prior_table(std::size_t nodes = 1000000) {
  PriorTable t;
  double total = 0.0;
  for (int nu = 1; nu <= 30; ++nu) {
    const int other = nu <= 28 ? nu + 1 : nu - 1;
    t.kl[nu - 1] = divergence(nu, other, 0.5, nodes);
    t.mass[nu - 1] = std::exp(t.kl[nu - 1]) - 1.0;
    total += t.mass[nu - 1];
  }
  for (double& m : t.mass) m /= total;
  return t;
}

}  // namespace oracle
