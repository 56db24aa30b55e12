#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/errors.hpp"
#include "logchaos/fields/ensemble.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/reconstruct/reconstruct.hpp"
#include "logchaos/stats/estimators.hpp"

namespace logchaos {

/// Uniform measure on the gamma-thick points of S_eps, divided by the
/// per-point exceedance probability.
struct ThickPointMeasure {
  GridSpec grid;
  double gamma = 0.0;
  double eps = 0.0;
  double probability = 1.0;
  double threshold = 0.0;
  std::vector<double> masses;  // 0 or h^d / P

  double total() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
  }
};

/// P(S_eps(x) >= gamma log(1/eps)) for Var S_eps = log(1/eps).
inline double thick_point_probability(double gamma, double eps) {
  return 0.5 * std::erfc(gamma * std::sqrt(std::log(1.0 / eps)) / std::sqrt(2.0));
}

/// `variance` must be the constant log(1/eps) of the stationary cut-off
/// field; anything else has no analytic exceedance probability.
inline ThickPointMeasure thick_point_measure(std::span<const double> field, std::span<const double> variance,
                                             const GridSpec& grid, double gamma, double eps) {
  if (field.size() != grid.size()) throw ConfigError("thick_point_measure: field size mismatch");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("thick_point_measure: eps must lie in (0,1)");
  if (!(gamma >= 0.0 && gamma < critical_gamma(grid.dim())))
    throw PreconditionError("thick_point_measure: gamma must lie in [0, sqrt(2d))");
  const double v = std::log(1.0 / eps);
  for (double s : variance)
    if (std::abs(s - v) > 1e-9 * v)
      throw ConfigError("thick_point_measure: field is not the stationary cut-off field (variance differs from "
                        "log(1/eps)); the exceedance probability is unavailable");
  ThickPointMeasure t;
  t.grid = grid;
  t.gamma = gamma;
  t.eps = eps;
  t.threshold = gamma * v;
  t.probability = thick_point_probability(gamma, eps);
  if (!(t.probability > 0.0)) throw UnderflowError("thick_point_measure: exceedance probability underflowed");
  const double mass = grid.cell_volume() / t.probability;
  t.masses.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) t.masses[i] = field[i] >= t.threshold ? mass : 0.0;
  return t;
}

inline ThickPointMeasure thick_point_measure(std::span<const double> field, const GridSpec& grid, double gamma,
                                             double eps) {
  const double v = std::log(1.0 / eps);
  return thick_point_measure(field, std::span<const double>(&v, 1), grid, gamma, eps);
}

struct ThickPointSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;         // finest scale builds the reference nu_gamma
  std::vector<double> scales; // thick-point scales; empty: all but the finest
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  double gamma = 0.5;
  std::size_t replicas = 4000;
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

struct ThickPointRow {
  double eps = 0.0;
  double probability = 0.0;
  stats::StatReport rel_l2;  // rho_n(psi) against nu_gamma(psi)
  stats::StatReport mass;    // total mass, target Leb(D)
};

struct ThickPointReport {
  double reference_eps = 0.0;
  std::vector<ThickPointRow> rows;
  std::vector<std::string> events;
};

inline std::vector<double> thick_point_scales(const ThickPointSetup& s) {
  if (!s.scales.empty()) return s.scales;
  return {s.ladder.scales().begin(), s.ladder.scales().end() - 1};
}

inline void validate(const ThickPointSetup& s) {
  if (s.ladder.size() < 2) throw ConfigError("thick points: ladder needs at least 2 scales");
  if (!(s.gamma >= 0.0 && s.gamma < critical_gamma(s.grid.dim())))
    throw PreconditionError("thick points: gamma must lie in [0, sqrt(2d))");
  if (s.replicas < 2) throw ConfigError("thick points: need at least 2 replicas");
  s.ladder.check_against(s.grid, false);
  for (double e : thick_point_scales(s))
    if (s.ladder.index_of(e) + 1 >= s.ladder.size())
      throw ConfigError("thick points: scales must be coarser than the reference scale");
  TestFunction psi(s.grid);
}

inline ThickPointReport thick_point_study(const ThickPointSetup& s) {
  validate(s);
  const GridSpec& g = s.grid;
  const auto scales = thick_point_scales(s);
  const std::size_t np = g.size(), R = s.replicas, ref = s.ladder.size() - 1;
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  TestFunction psi(g);
  std::vector<double> target(R);
  std::vector<std::vector<double>> pair(scales.size(), std::vector<double>(R)), mass(scales.size(), std::vector<double>(R));
  parallel_for(R, s.jobs, [&](std::size_t r) {
    auto f = sampler.sample(s.rng_seed, r);
    auto at = [&](std::size_t j) { return std::span<const double>(f.data() + j * np, np); };
    target[r] = integrate(gmc_subcritical(at(ref), std::log(1.0 / s.ladder.finest()), s.gamma, g, s.ladder.finest()),
                          psi.table());
    for (std::size_t k = 0; k < scales.size(); ++k) {
      auto t = thick_point_measure(at(s.ladder.index_of(scales[k])), g, s.gamma, scales[k]);
      double p = 0.0;
      for (std::size_t i = 0; i < np; ++i) p += t.masses[i] * psi.table()[i];
      pair[k][r] = p;
      mass[k][r] = t.total();
    }
  });
  ThickPointReport out;
  out.reference_eps = s.ladder.finest();
  out.events = sampler.events();
  for (std::size_t k = 0; k < scales.size(); ++k)
    out.rows.push_back({scales[k], thick_point_probability(s.gamma, scales[k]), stats::relative_l2_error(pair[k], target),
                        stats::mc_mean_ci(mass[k])});
  return out;
}

}  // namespace logchaos
