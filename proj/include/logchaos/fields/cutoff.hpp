#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/fields/seed_covariance.hpp"
#include "logchaos/quadrature.hpp"

namespace logchaos {

namespace detail {

inline void check_scale(double eps, const char* what) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError(std::string(what) + ": scale must lie in (0,1), got " + std::to_string(eps));
}

/// int_a^b k1(t) dt / t, integrated in the log variable.
inline double log_integral(const SeedCovariance& seed, double a, double b) {
  if (b <= a) return 0.0;
  if (seed.profile() == SeedProfile::triangle) return std::log(b / a) - (b - a);
  return quadrature::integrate([&](double s) { return seed(std::exp(s)); }, std::log(a), std::log(b));
}

}  // namespace detail

/// Covariance K_eps(r) of the cut-off field S_eps at separation r.
inline double cutoff_covariance(const SeedCovariance& seed, double eps, double r) {
  detail::check_scale(eps, "cutoff_covariance");
  if (!(r >= 0.0)) throw DomainError("cutoff_covariance: separation must be >= 0");
  if (r == 0.0) return std::log(1.0 / eps);
  if (r >= 1.0) return 0.0;
  return detail::log_integral(seed, r, std::min(1.0, r / eps));
}

/// Cov(S_eps(x), S_delta(y)); only the coarser scale matters.
inline double cross_cutoff_covariance(const SeedCovariance& seed, double eps, double delta, double r) {
  detail::check_scale(eps, "cross_cutoff_covariance");
  detail::check_scale(delta, "cross_cutoff_covariance");
  return cutoff_covariance(seed, std::max(eps, delta), r);
}

/// Covariance of the layer S_fine - S_coarse, supported on r < coarse.
inline double layer_covariance(const SeedCovariance& seed, double coarse, double fine, double r) {
  if (!(fine < coarse)) throw PreconditionError("layer_covariance: need fine < coarse");
  detail::check_scale(coarse, "layer_covariance");
  detail::check_scale(fine, "layer_covariance");
  if (!(r >= 0.0)) throw DomainError("layer_covariance: separation must be >= 0");
  if (r == 0.0) return std::log(coarse / fine);
  if (r >= coarse) return 0.0;
  return detail::log_integral(seed, r / coarse, std::min(1.0, r / fine));
}

enum class AtZero { reject, limit };

/// g_S(r) = int_r^1 (k1(t) - 1) dt / t.  The full-field covariance is log(1/r) + g_S(r).
/// At r = 0 only the limit exists; it is returned when `at_zero == AtZero::limit`.
inline double g_remainder(const SeedCovariance& seed, double r, AtZero at_zero = AtZero::reject) {
  if (r < 0.0 || r > 1.0) throw DomainError("g_remainder: separation must lie in (0,1]");
  if (r == 0.0 && at_zero == AtZero::reject)
    throw DomainError("g_remainder: r = 0 only has a limit value; pass AtZero::limit");
  if (seed.profile() == SeedProfile::triangle) return r - 1.0;
  return quadrature::integrate([&](double t) { return (seed(t) - 1.0) / t; }, r, 1.0);
}

using Offset = std::array<double, 2>;

inline double norm(const Offset& u) { return std::hypot(u[0], u[1]); }

/// Cov(Y_{eps,x}(u), Y_{eps,x}(v)) = int_eps^1 [k1(s|u-v|) - k1(s|u|) - k1(s|v|) + 1] ds / s.
/// eps = 0 gives the limit covariance.
inline double increment_covariance(const SeedCovariance& seed, double eps, const Offset& u, const Offset& v) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("increment_covariance: scale must lie in [0,1)");
  const double ru = norm(u), rv = norm(v), ruv = norm({u[0] - v[0], u[1] - v[1]});
  auto f = [&](double s) { return (seed(s * ruv) - seed(s * ru) - seed(s * rv) + 1.0) / s; };
  std::vector<double> kinks;
  for (double r : {ru, rv, ruv})
    if (r > 1.0) kinks.push_back(1.0 / r);
  return quadrature::integrate(f, eps, 1.0, kinks);
}

inline double limit_increment_covariance(const SeedCovariance& seed, const Offset& u, const Offset& v) {
  if (norm(u) > 1.0 + 1e-12 || norm(v) > 1.0 + 1e-12)
    throw DomainError("limit_increment_covariance: offsets must lie in the closed unit ball");
  return increment_covariance(seed, 0.0, u, v);
}

}  // namespace logchaos
