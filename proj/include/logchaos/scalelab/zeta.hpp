#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/quadrature.hpp"
#include "logchaos/rng.hpp"
#include "logchaos/stats/estimators.hpp"

namespace logchaos {

/// The first `count` primes, by a sieve of Eratosthenes.
inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  if (count == 0) return {};
  double n = static_cast<double>(count);
  std::size_t bound = count < 6 ? 15 : static_cast<std::size_t>(n * (std::log(n) + std::log(std::log(n)))) + 1;
  std::vector<bool> composite(bound + 1, false);
  std::vector<std::uint64_t> out;
  for (std::size_t i = 2; i <= bound && out.size() < count; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::size_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

/// Randomized zeta model: G_N(x) = sum_k (W_k^R + i W_k^I) p_k^{-ix} / sqrt(2 p_k).
struct ZetaModel {
  std::size_t count = 0;
  std::vector<std::uint64_t> primes;
  double gamma = 1.0;

  ZetaModel(std::size_t n, double g) : count(n), primes(first_primes(n)), gamma(g) {
    if (n < 1) throw ConfigError("zeta model: need at least one prime");
  }

  /// Var Re G_N(x) = sum_k 1/(2 p_k).
  double variance() const {
    double v = 0.0;
    for (auto p : primes) v += 0.5 / double(p);
    return v;
  }

  /// Cov(Re G_N(x), Re G_N(y)) = sum_k cos((x - y) log p_k) / (2 p_k).
  double covariance(double x, double y) const {
    double c = 0.0;
    for (auto p : primes) c += std::cos((x - y) * std::log(double(p))) / (2.0 * double(p));
    return c;
  }
};

/// Replica-major samples of Re G_N at the points `xs`.
inline std::vector<double> zeta_field_sample(const ZetaModel& model, std::span<const double> xs, std::size_t replicas,
                                             std::uint64_t rng_seed, unsigned jobs = 1) {
  const std::size_t n = xs.size();
  std::vector<double> out(replicas * n, 0.0);
  parallel_for(replicas, jobs, [&](std::size_t r) {
    ReplicaStream rng(rng_seed, r, StreamPurpose::zeta_field);
    double* row = out.data() + r * n;
    for (auto p : model.primes) {
      const double a = rng.normal(), b = rng.normal(), s = 1.0 / std::sqrt(2.0 * double(p)), lp = std::log(double(p));
      for (std::size_t i = 0; i < n; ++i) row[i] += s * (a * std::cos(xs[i] * lp) + b * std::sin(xs[i] * lp));
    }
  });
  return out;
}

inline void check_zeta_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < std::sqrt(2.0))) throw PreconditionError("zeta: gamma must lie in (0, sqrt(2))");
}

/// E_k^G = E[exp(gamma Re G_k)] = exp(gamma^2 / (4 p)).
inline double zeta_factor_gaussian(double gamma, std::uint64_t p) { return std::exp(gamma * gamma / (4.0 * double(p))); }

/// E_k^X = E|1 - p^{-1/2} e^{2 pi i theta}|^{-gamma}, theta uniform.
inline double zeta_factor_euler(double gamma, std::uint64_t p) {
  const double a = 1.0 / std::sqrt(double(p));
  return quadrature::periodic_mean(
      [&](double t) { return std::pow(std::abs(1.0 - std::polar(a, 2.0 * M_PI * t)), -gamma); }, 1e-10);
}

/// log E|1 - lambda e^{is}|^gamma; behaves like gamma^2 lambda^2 / 4 for small lambda.
inline double zeta_log_moment(double gamma, double lambda) {
  if (!(std::abs(lambda) < 1.0)) throw DomainError("zeta_log_moment: need |lambda| < 1");
  return std::log(quadrature::periodic_mean(
      [&](double t) { return std::pow(std::abs(1.0 - std::polar(lambda, 2.0 * M_PI * t)), gamma); }, 1e-12));
}

/// Partial products g_1 .. g_N of E_k^G / E_k^X.
inline std::vector<double> zeta_gn_ratio(double gamma, std::size_t n) {
  check_zeta_gamma(gamma);
  if (n < 1) throw ConfigError("zeta_gn_ratio: N must be >= 1");
  std::vector<double> g;
  double prod = 1.0;
  for (auto p : first_primes(n)) {
    prod *= zeta_factor_gaussian(gamma, p) / zeta_factor_euler(gamma, p);
    g.push_back(prod);
  }
  return g;
}

struct CircleProducts {
  std::vector<std::size_t> n;  // 2 .. N
  std::vector<double> g;
  double decay_slope = 0.0;  // d log g_N / d log log N, expected near -gamma^2
};

/// prod_{m=2}^{N} exp(-gamma^2/(m log m) - gamma^2/(2 m log^2 m)).
inline CircleProducts circle_counterexample_gn(double gamma, std::size_t n_max) {
  if (!(gamma > 0.0)) throw PreconditionError("circle_counterexample_gn: gamma must be > 0");
  if (n_max < 2) throw ConfigError("circle_counterexample_gn: N must be >= 2");
  CircleProducts c;
  double s = 0.0;
  const double g2 = gamma * gamma;
  std::vector<double> lx, ly;
  for (std::size_t m = 2; m <= n_max; ++m) {
    const double lm = std::log(double(m));
    s += g2 / (double(m) * lm) + g2 / (2.0 * double(m) * lm * lm);
    c.n.push_back(m);
    c.g.push_back(std::exp(-s));
    if (m >= 16 && (m & (m - 1)) == 0) {
      lx.push_back(std::log(lm));
      ly.push_back(-s);
    }
  }
  if (lx.size() >= 3) c.decay_slope = stats::slope_fit(lx, ly).slope;
  return c;
}

}  // namespace logchaos
