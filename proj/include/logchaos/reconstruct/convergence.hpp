#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/errors.hpp"
#include "logchaos/fields/ensemble.hpp"
#include "logchaos/fields/holder.hpp"
#include "logchaos/reconstruct/reconstruct.hpp"
#include "logchaos/stats/estimators.hpp"

namespace logchaos {

struct ConvergenceSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  double gamma = 0.5;
  bool critical = false;                          // gamma_c with the Seneta-Heyde factor
  std::vector<double> scales;                     // reconstruction scales; empty: all but the finest
  std::size_t replicas = 2000;
  std::size_t counter_replicas = 0;               // > 0: counter from an independent batch
  CounterMode counter_mode = CounterMode::per_point;
  double counter_se_cap = 0.05;
  std::optional<HolderFieldSpec> perturbation;    // X = S + H, chaos e^{gamma H} nu_S
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

struct ReconstructionResult {
  double eps = 0.0;
  std::vector<double> pairings;    // <R_eps, psi> per replica
  std::vector<double> reference;   // <S_ref (+ H), psi> per replica
  stats::StatReport l2;
  stats::StatReport mean_pairing;
  double corr = 0.0;
  CounterTerm counter;
};

struct ConvergenceReport {
  double reference_eps = 0.0;
  double gamma = 0.0;
  stats::StatReport reference_variance;
  std::vector<ReconstructionResult> rows;
  stats::SlopeFit slope;  // log l2 against log eps, diagnostic only
  std::vector<std::string> events;
};

/// Checks everything that can be checked without sampling.
inline void validate(const ConvergenceSetup& s) {
  if (s.ladder.size() < 3) throw ConfigError("convergence: ladder needs at least 3 scales");
  if (s.critical) {
    if (std::abs(s.gamma - critical_gamma(s.grid.dim())) > 1e-12)
      throw ConfigError("convergence: critical runs use gamma = sqrt(2d)");
  } else if (!(s.gamma > 0.0 && s.gamma < critical_gamma(s.grid.dim()))) {
    throw PreconditionError("convergence: gamma must lie in (0, sqrt(2d))");
  }
  if (s.replicas < 2) throw ConfigError("convergence: need at least 2 replicas");
  s.ladder.check_against(s.grid, false);
  const std::size_t ref = s.ladder.size() - 1;
  auto scales = s.scales.empty() ? std::vector<double>(s.ladder.scales().begin(), s.ladder.scales().end() - 1)
                                 : s.scales;
  for (double e : scales) {
    if (s.ladder.index_of(e) >= ref) throw ConfigError("convergence: reconstruction scales must be coarser than the reference");
    if (e > s.grid.margin() * (1.0 + 1e-12))
      throw ConfigError("convergence: scale " + std::to_string(e) + " exceeds the inner margin");
  }
  TestFunction psi(s.grid);  // throws when the bump misses every grid point
}

/// Pairs the reconstruction at each scale with the finest-scale field.
inline ConvergenceReport convergence_study(const ConvergenceSetup& s) {
  validate(s);
  const GridSpec& g = s.grid;
  const std::size_t ref = s.ladder.size() - 1;
  std::vector<double> scales =
      s.scales.empty() ? std::vector<double>(s.ladder.scales().begin(), s.ladder.scales().end() - 1) : s.scales;
  std::vector<std::size_t> idx;
  std::vector<Mollifier> etas;
  for (double e : scales) {
    idx.push_back(s.ladder.index_of(e));
    etas.emplace_back(g, e);
  }
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  TestFunction psi(g);
  const auto inner = g.inner_points();
  const std::size_t width = inner.size(), np = g.size();
  const std::size_t R = s.replicas, total = R + s.counter_replicas;

  // a[k][r * width + i]: log-smoothed field at scale k, replica r, inner point i.
  std::vector<std::vector<double>> a(scales.size(), std::vector<double>(total * width));
  std::vector<double> reference(R);
  parallel_for(total, s.jobs, [&](std::size_t r) {
    auto f = sampler.sample(s.rng_seed, r);
    std::vector<double> h;
    if (s.perturbation) h = sample_holder_replica(*s.perturbation, g, s.rng_seed, r);
    for (std::size_t k = 0; k < scales.size(); ++k) {
      std::span<const double> field(f.data() + idx[k] * np, np);
      const double eps = scales[k], var = std::log(1.0 / eps);
      ChaosMeasure nu = s.critical ? gmc_critical(field, var, g, eps) : gmc_subcritical(field, var, s.gamma, g, eps);
      if (!h.empty()) nu = chaos_option1(nu, h);
      auto v = log_smoothed_field(nu, nu.gamma, etas[k]);
      std::copy(v.begin(), v.end(), a[k].begin() + r * width);
    }
    if (r < R) {
      std::vector<double> x(f.begin() + ref * np, f.begin() + (ref + 1) * np);
      for (std::size_t p = 0; p < h.size(); ++p) x[p] += h[p];
      reference[r] = psi.pair(x);
    }
  });

  ConvergenceReport out;
  out.reference_eps = s.ladder.finest();
  out.gamma = s.gamma;
  out.events = sampler.events();
  out.reference_variance = stats::covariance(reference, reference);
  CounterOptions copt;
  copt.mode = s.counter_mode;
  copt.se_cap = s.counter_se_cap;
  std::vector<double> log_eps, log_err;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    std::span<const double> all(a[k]);
    auto batch = s.counter_replicas > 0 ? all.subspan(R * width) : all.first(R * width);
    ReconstructionResult row;
    row.eps = scales[k];
    row.counter = counter_from_samples(batch, s.counter_replicas > 0 ? s.counter_replicas : R, s.gamma, etas[k], copt);
    row.reference = reference;
    row.pairings.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < width; ++i) sum += psi.table()[inner[i]] * (all[r * width + i] - row.counter.values[i]);
      row.pairings[r] = sum * g.cell_volume();
    }
    row.l2 = stats::l2_error(row.pairings, reference);
    row.mean_pairing = stats::mc_mean_ci(row.pairings);
    row.corr = stats::correlation(row.pairings, reference);
    log_eps.push_back(std::log(row.eps));
    log_err.push_back(std::log(std::max(row.l2.estimate, 1e-300)));
    out.rows.push_back(std::move(row));
  }
  if (out.rows.size() >= 2) out.slope = stats::slope_fit(log_eps, log_err);
  return out;
}

}  // namespace logchaos
