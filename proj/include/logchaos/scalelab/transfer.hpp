#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/errors.hpp"
#include "logchaos/fields/ensemble.hpp"
#include "logchaos/mollifier.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/reconstruct/reconstruct.hpp"
#include "logchaos/stats/estimators.hpp"

namespace logchaos {

/// nu_{gamma,gamma0,eps}: mollified source chaos raised to gamma/gamma0 and
/// normalized by its replica mean.  Masses live on the inner grid points.
struct TransferMeasure {
  GridSpec grid;
  double gamma0 = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
  std::vector<double> masses;  // full grid, zero outside the inner box
  double normalizer = 0.0;
  double normalizer_se = 0.0;

  double total() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
  }
};

/// gamma, gamma0 in (0, sqrt(d)) and the moment guard gamma gamma0 < 2d,
/// i.e. the exponent gamma/gamma0 stays below q_c = 2d/gamma0^2.
inline void check_transfer_guard(double gamma0, double gamma, int dim) {
  const double root_d = std::sqrt(double(dim));
  std::ostringstream why;
  if (!(gamma0 > 0.0 && gamma0 < root_d)) why << " gamma0=" << gamma0 << " not in (0, sqrt(d)=" << root_d << ");";
  if (!(gamma > 0.0 && gamma < root_d)) why << " gamma=" << gamma << " not in (0, sqrt(d)=" << root_d << ");";
  if (!(gamma * gamma0 < 2.0 * dim))
    why << " exponent gamma/gamma0=" << gamma / gamma0 << " reaches q_c=2d/gamma0^2=" << 2.0 * dim / (gamma0 * gamma0)
        << ";";
  if (!why.str().empty()) throw PreconditionError("gamma transfer rejected:" + why.str());
}

/// One transfer measure per source replica.  The normalizer is the mean of
/// w^{gamma/gamma0} over replicas, pooled over inner points when `pooled`.
inline std::vector<TransferMeasure> gamma_transfer(std::span<const ChaosMeasure> sources, double gamma,
                                                   const Mollifier& eta, unsigned jobs = 1, bool pooled = true) {
  if (sources.size() < 2) throw PreconditionError("gamma_transfer: need at least 2 source replicas");
  const GridSpec& g = sources[0].grid;
  const double gamma0 = sources[0].gamma;
  check_transfer_guard(gamma0, gamma, g.dim());
  for (const auto& nu : sources)
    if (nu.gamma != gamma0 || nu.masses.size() != g.size())
      throw ConfigError("gamma_transfer: source replicas differ in gamma or grid");
  const auto inner = g.inner_points();
  const std::size_t R = sources.size(), width = inner.size();
  const double q = gamma / gamma0;
  std::vector<double> p(R * width);
  parallel_for(R, jobs, [&](std::size_t r) {
    for (std::size_t k = 0; k < width; ++k) p[r * width + k] = std::pow(smooth_at(sources[r], eta, inner[k]), q);
  });

  std::vector<double> norm(width), norm_se(width);
  if (pooled) {
    std::vector<double> per(R, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t k = 0; k < width; ++k) per[r] += p[r * width + k];
      per[r] /= width;
    }
    auto rep = stats::mc_mean_ci(per);
    norm.assign(width, rep.estimate);
    norm_se.assign(width, rep.se);
  } else {
    std::vector<double> col(R);
    for (std::size_t k = 0; k < width; ++k) {
      for (std::size_t r = 0; r < R; ++r) col[r] = p[r * width + k];
      auto rep = stats::mc_mean_ci(col);
      norm[k] = rep.estimate;
      norm_se[k] = rep.se;
    }
  }

  std::vector<TransferMeasure> out(R);
  for (std::size_t r = 0; r < R; ++r) {
    auto& t = out[r];
    t.grid = g;
    t.gamma0 = gamma0;
    t.gamma = gamma;
    t.eps = eta.scale();
    t.normalizer = norm[0];
    t.normalizer_se = norm_se[0];
    t.masses.assign(g.size(), 0.0);
    for (std::size_t k = 0; k < width; ++k) t.masses[inner[k]] = g.cell_volume() * p[r * width + k] / norm[k];
  }
  return out;
}

struct TransferSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;          // finest scale builds both chaos measures
  std::vector<double> scales;  // mollification scales
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  double gamma0 = 0.4;
  double gamma = 0.7;
  std::size_t replicas = 4000;
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

struct TransferRow {
  double eps = 0.0;
  stats::StatReport rel_l2;  // transfer(psi) against nu_gamma(psi)
  stats::StatReport mass;    // total mass, target Leb(inner box)
  double normalizer = 0.0;
  double normalizer_se = 0.0;
};

struct TransferReport {
  double reference_eps = 0.0;
  double inner_volume = 0.0;
  std::vector<TransferRow> rows;
  std::vector<std::string> events;
};

inline void validate(const TransferSetup& s) {
  check_transfer_guard(s.gamma0, s.gamma, s.grid.dim());
  if (s.scales.empty()) throw ConfigError("gamma transfer: no mollification scales given");
  if (s.replicas < 2) throw ConfigError("gamma transfer: need at least 2 replicas");
  s.ladder.check_against(s.grid, false);
  for (double e : s.scales) {
    if (!(e > 0.0 && e <= s.grid.margin() * (1.0 + 1e-12)))
      throw ConfigError("gamma transfer: scale " + std::to_string(e) + " must lie in (0, margin]");
    if (e < 2.0 * s.grid.spacing()) throw ConfigError("gamma transfer: scale below two grid spacings");
  }
  TestFunction psi(s.grid);
}

inline TransferReport transfer_study(const TransferSetup& s) {
  validate(s);
  const GridSpec& g = s.grid;
  const std::size_t np = g.size(), R = s.replicas, ref = s.ladder.size() - 1;
  const double ef = s.ladder.finest(), var = std::log(1.0 / ef);
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  TestFunction psi(g);
  std::vector<ChaosMeasure> sources(R);
  std::vector<double> target(R);
  parallel_for(R, s.jobs, [&](std::size_t r) {
    auto f = sampler.sample(s.rng_seed, r);
    std::span<const double> fine(f.data() + ref * np, np);
    sources[r] = gmc_subcritical(fine, var, s.gamma0, g, ef);
    target[r] = integrate(gmc_subcritical(fine, var, s.gamma, g, ef), psi.table());
  });
  TransferReport out;
  out.reference_eps = ef;
  out.inner_volume = std::pow(g.side() - 2.0 * g.margin(), g.dim());
  out.events = sampler.events();
  for (double e : s.scales) {
    auto t = gamma_transfer(sources, s.gamma, Mollifier(g, e), s.jobs);
    std::vector<double> pair(R), mass(R);
    for (std::size_t r = 0; r < R; ++r) {
      pair[r] = integrate(ChaosMeasure{g, e, s.gamma, ChaosVariant::subcritical, t[r].masses}, psi.table());
      mass[r] = t[r].total();
    }
    out.rows.push_back({e, stats::relative_l2_error(pair, target), stats::mc_mean_ci(mass), t[0].normalizer,
                        t[0].normalizer_se});
  }
  return out;
}

}  // namespace logchaos
