#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/mollifier.hpp"

namespace logchaos {

enum class ChaosVariant { subcritical, critical, option1, option2 };

inline std::string to_string(ChaosVariant v) {
  switch (v) {
    case ChaosVariant::subcritical: return "subcritical";
    case ChaosVariant::critical: return "critical";
    case ChaosVariant::option1: return "option1";
    case ChaosVariant::option2: return "option2";
  }
  return "?";
}

inline ChaosVariant parse_chaos_variant(const std::string& s) {
  for (auto v : {ChaosVariant::subcritical, ChaosVariant::critical, ChaosVariant::option1, ChaosVariant::option2})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown chaos variant '" + s + "'");
}

/// Discrete chaos measure: one nonnegative mass per grid cell.
struct ChaosMeasure {
  GridSpec grid;
  double eps = 0.0;
  double gamma = 0.0;
  ChaosVariant variant = ChaosVariant::subcritical;
  std::vector<double> masses;

  double total() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
  }
};

inline double critical_gamma(int dim) { return std::sqrt(2.0 * dim); }

namespace detail {

inline void check_field_size(const GridSpec& grid, std::size_t n, const char* what) {
  if (n != grid.size()) throw ConfigError(std::string(what) + ": field size does not match the grid");
}

inline double variance_at(std::span<const double> variance, std::size_t i) {
  return variance.size() == 1 ? variance[0] : variance[i];
}

inline ChaosMeasure exponentiate(std::span<const double> field, std::span<const double> variance, double gamma,
                                 const GridSpec& grid, double eps, double factor, ChaosVariant variant) {
  check_field_size(grid, field.size(), "chaos");
  if (variance.size() != 1) check_field_size(grid, variance.size(), "chaos variance");
  ChaosMeasure mu{grid, eps, gamma, variant, std::vector<double>(grid.size())};
  const double hd = grid.cell_volume() * factor;
  const double half = 0.5 * gamma * gamma;
  for (std::size_t i = 0; i < field.size(); ++i)
    mu.masses[i] = hd * std::exp(gamma * field[i] - half * variance_at(variance, i));
  return mu;
}

}  // namespace detail

/// m_i = h^d exp(gamma s_i - gamma^2 sigma^2(x_i) / 2).  `variance` is the
/// exact variance of the approximation, per point or one shared value.
inline ChaosMeasure gmc_subcritical(std::span<const double> field, std::span<const double> variance, double gamma,
                                    const GridSpec& grid, double eps) {
  if (!(gamma >= 0.0 && gamma < critical_gamma(grid.dim())))
    throw PreconditionError("gmc_subcritical: gamma must lie in [0, sqrt(2d))");
  return detail::exponentiate(field, variance, gamma, grid, eps, 1.0, ChaosVariant::subcritical);
}

inline ChaosMeasure gmc_subcritical(std::span<const double> field, double variance, double gamma,
                                    const GridSpec& grid, double eps) {
  return gmc_subcritical(field, std::span<const double>(&variance, 1), gamma, grid, eps);
}

/// Critical chaos at gamma_c = sqrt(2d) with the Seneta-Heyde factor sqrt(log(1/eps)).
inline ChaosMeasure gmc_critical(std::span<const double> field, std::span<const double> variance,
                                 const GridSpec& grid, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("gmc_critical: scale must lie in (0,1)");
  return detail::exponentiate(field, variance, critical_gamma(grid.dim()), grid, eps, std::sqrt(std::log(1.0 / eps)),
                              ChaosVariant::critical);
}

inline ChaosMeasure gmc_critical(std::span<const double> field, double variance, const GridSpec& grid, double eps) {
  return gmc_critical(field, std::span<const double>(&variance, 1), grid, eps);
}

/// nu_X = e^{gamma H} nu_G.
inline ChaosMeasure chaos_option1(const ChaosMeasure& nu, std::span<const double> h) {
  detail::check_field_size(nu.grid, h.size(), "chaos_option1");
  ChaosMeasure out = nu;
  out.variant = ChaosVariant::option1;
  for (std::size_t i = 0; i < h.size(); ++i) out.masses[i] *= std::exp(nu.gamma * h[i]);
  return out;
}

/// Per-point estimate of E[exp(gamma X_eps(x))].
struct NormalizerTable {
  std::vector<double> value;
  std::vector<double> se;
  std::size_t replicas = 0;

  /// Closed form exp(gamma^2 (sigma^2 + v) / 2) for Gaussian X with variance sigma^2 + v.
  static NormalizerTable gaussian(std::span<const double> variance, double gamma) {
    NormalizerTable t;
    for (double v : variance) {
      t.value.push_back(std::exp(0.5 * gamma * gamma * v));
      t.se.push_back(0.0);
    }
    return t;
  }

  /// Monte Carlo estimate from replica-major fields (replicas x points).
  /// With `pooled`, one value is shared by every point (stationary fields).
  static NormalizerTable monte_carlo(std::span<const double> fields, std::size_t points, double gamma,
                                     bool pooled = false) {
    if (points == 0 || fields.size() % points != 0) throw ConfigError("normalizer: bad field shape");
    const std::size_t R = fields.size() / points;
    if (R < 2) throw PreconditionError("normalizer: need at least 2 replicas");
    NormalizerTable t;
    t.replicas = R;
    if (pooled) {
      // SE from the per-replica spatial means, which are independent.
      std::vector<double> per(R, 0.0);
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t p = 0; p < points; ++p) per[r] += std::exp(gamma * fields[r * points + p]);
        per[r] /= points;
      }
      double m = 0.0, ss = 0.0;
      for (double v : per) m += v;
      m /= R;
      for (double v : per) ss += (v - m) * (v - m);
      double se = std::sqrt(ss / (R - 1) / R);
      t.value.assign(points, m);
      t.se.assign(points, se);
      return t;
    }
    t.value.assign(points, 0.0);
    t.se.assign(points, 0.0);
    std::vector<double> ss(points, 0.0);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t p = 0; p < points; ++p) t.value[p] += std::exp(gamma * fields[r * points + p]);
    for (double& v : t.value) v /= R;
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t p = 0; p < points; ++p) {
        double d = std::exp(gamma * fields[r * points + p]) - t.value[p];
        ss[p] += d * d;
      }
    for (std::size_t p = 0; p < points; ++p) t.se[p] = std::sqrt(ss[p] / (R - 1) / R);
    return t;
  }
};

/// m_i = h^d e^{gamma X_i} / N(x_i).  Normalizers must be positive with
/// relative SE at most `max_rel_se`.
inline ChaosMeasure chaos_option2(std::span<const double> x, const NormalizerTable& norm, const GridSpec& grid,
                                  double gamma, double eps, double max_rel_se = 0.05) {
  detail::check_field_size(grid, x.size(), "chaos_option2");
  detail::check_field_size(grid, norm.value.size(), "chaos_option2 normalizer");
  if (!(gamma >= 0.0 && gamma < critical_gamma(grid.dim())))
    throw PreconditionError("chaos_option2: gamma must lie in [0, sqrt(2d))");
  for (std::size_t i = 0; i < norm.value.size(); ++i) {
    if (!(norm.value[i] > 0.0)) throw QualityError("chaos_option2: nonpositive normalizer");
    if (norm.se[i] / norm.value[i] > max_rel_se)
      throw QualityError("chaos_option2: normalizer relative SE above " + std::to_string(max_rel_se) +
                         "; use more replicas");
  }
  ChaosMeasure mu{grid, eps, gamma, ChaosVariant::option2, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < x.size(); ++i) mu.masses[i] = grid.cell_volume() * std::exp(gamma * x[i]) / norm.value[i];
  return mu;
}

/// nu(f) = sum_i f(x_i) m_i.
inline double integrate(const ChaosMeasure& nu, std::span<const double> f) {
  detail::check_field_size(nu.grid, f.size(), "integrate");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * nu.masses[i];
  return s;
}

/// int eta_eps(y - x) nu(dy) at grid point x.
inline double smooth_at(const ChaosMeasure& nu, const Mollifier& eta, std::size_t x) {
  const auto& g = nu.grid;
  if (eta.scale() > g.margin() * (1.0 + 1e-12) || !g.in_inner_box(x) || !eta.fits(x))
    throw PreconditionError("smooth_at: mollifier support leaves the domain (need x in the inner box, eps <= m)");
  double v = eta.apply(nu.masses.data(), x);
  if (!(v > 0.0)) throw UnderflowError("smooth_at: smoothed mass underflowed to zero");
  return v;
}

}  // namespace logchaos
