#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/chaos/tail.hpp"
#include "logchaos/fields/cutoff.hpp"
#include "logchaos/fields/ensemble.hpp"
#include "logchaos/fields/holder.hpp"
#include "logchaos/io.hpp"
#include "logchaos/reconstruct/convergence.hpp"
#include "logchaos/reconstruct/reconstruct.hpp"
#include "logchaos/scalelab/thick_points.hpp"
#include "logchaos/scalelab/transfer.hpp"
#include "logchaos/scalelab/zeta.hpp"
#include "logchaos/stats/estimators.hpp"

// Experiment drivers shared by the CLI and the acceptance suite.  Each
// driver has a validate() that runs before any sampling or output.

namespace logchaos {

// ---------------------------------------------------------------- audit

struct AuditSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  std::size_t replicas = 4000;
  std::size_t pairs = 24;
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

struct AuditRow {
  double eps = 0.0;
  std::size_t i = 0, j = 0;
  double distance = 0.0;
  stats::StatReport empirical;
  double theory = 0.0;

  double z() const { return empirical.se > 0.0 ? (empirical.estimate - theory) / empirical.se : 0.0; }
};

struct AuditReport {
  std::vector<AuditRow> rows;
  std::vector<std::string> events;
};

/// Point pairs anchored at the centre, with separations spread over half the
/// box; in 2D the direction cycles through the axes and the diagonal.
inline std::vector<std::pair<std::size_t, std::size_t>> audit_pairs(const GridSpec& g, std::size_t count) {
  const std::size_t c = g.centre_index();
  const auto cc = g.unravel(c);
  const int reach = g.points_per_axis() / 2 - 1;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < count; ++k) {
    int t = count > 1 ? static_cast<int>(std::lround(double(k) * reach / double(count - 1))) : 0;
    std::array<int, 2> o{t, 0};
    if (g.dim() == 2) {
      if (k % 3 == 1) o = {0, t};
      if (k % 3 == 2) o = {t * 2 / 3, t * 2 / 3};
    }
    std::array<int, 2> q{cc[0] + o[0], g.dim() == 2 ? cc[1] + o[1] : 0};
    std::size_t j = g.ravel(q[0], q[1]);
    if (seen.insert(j).second) out.emplace_back(c, j);
  }
  return out;
}

inline void validate(const AuditSetup& s) {
  if (s.replicas < 30) throw ConfigError("covariance audit: need at least 30 replicas");
  if (s.pairs < 1) throw ConfigError("covariance audit: need at least one pair");
  s.ladder.check_against(s.grid, false);
}

inline AuditReport covariance_audit(const AuditSetup& s) {
  validate(s);
  const GridSpec& g = s.grid;
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  const auto pairs = audit_pairs(g, s.pairs);
  std::vector<std::size_t> points;
  for (auto [i, j] : pairs) points.push_back(j);
  points.push_back(pairs.front().first);
  const std::size_t np = g.size(), w = points.size(), L = s.ladder.size(), R = s.replicas;
  std::vector<double> kept(R * L * w);
  parallel_for(R, s.jobs, [&](std::size_t r) {
    auto f = sampler.sample(s.rng_seed, r);
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t k = 0; k < w; ++k) kept[(r * L + l) * w + k] = f[l * np + points[k]];
  });
  AuditReport out;
  out.events = sampler.events();
  std::vector<double> a(R), b(R);
  for (std::size_t l = 0; l < L; ++l) {
    const double eps = s.ladder[l];
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      for (std::size_t r = 0; r < R; ++r) {
        a[r] = kept[(r * L + l) * w + w - 1];
        b[r] = kept[(r * L + l) * w + k];
      }
      const double d = g.distance(pairs[k].first, pairs[k].second);
      out.rows.push_back({eps, pairs[k].first, pairs[k].second, d, stats::covariance(a, b),
                          cutoff_covariance(s.seed_covariance, eps, d)});
    }
  }
  return out;
}

inline io::CsvTable to_csv(const AuditReport& r) {
  io::CsvTable t({"epsilon", "i", "j", "distance", "empirical", "se", "theory", "z"});
  for (const auto& row : r.rows)
    t.add(row.eps, row.i, row.j, row.distance, row.empirical.estimate, row.empirical.se, row.theory, row.z());
  return t;
}

// ---------------------------------------------------------------- chaos

struct ChaosSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  double gamma = 0.5;
  ChaosVariant variant = ChaosVariant::subcritical;
  std::optional<HolderFieldSpec> perturbation;  // option1 and option2
  std::size_t replicas = 1000;
  double tail_q = 2.0;
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

struct ChaosScaleSummary {
  double eps = 0.0;
  stats::StatReport mass;
  std::optional<TailDiagnostic> tail;
};

struct ChaosReport {
  double gamma = 0.0;
  ChaosVariant variant = ChaosVariant::subcritical;
  std::vector<double> totals;  // replica-major, scale-minor
  std::vector<ChaosScaleSummary> scales;
  std::vector<std::string> events;
};

inline double chaos_gamma(const ChaosSetup& s) {
  return s.variant == ChaosVariant::critical ? critical_gamma(s.grid.dim()) : s.gamma;
}

inline void validate(const ChaosSetup& s) {
  s.ladder.check_against(s.grid, false);
  if (s.replicas < 2) throw ConfigError("build-chaos: need at least 2 replicas");
  const double gc = critical_gamma(s.grid.dim());
  if (s.variant == ChaosVariant::critical) {
    if (s.perturbation) throw ConfigError("build-chaos: the critical variant takes no perturbation");
  } else if (!(s.gamma >= 0.0 && s.gamma < gc)) {
    throw PreconditionError("build-chaos: gamma must lie in [0, sqrt(2d))");
  }
  const bool needs_h = s.variant == ChaosVariant::option1 || s.variant == ChaosVariant::option2;
  if (needs_h && !s.perturbation) throw ConfigError("build-chaos: option1/option2 need a perturbation field");
  if (!needs_h && s.perturbation) throw ConfigError("build-chaos: perturbation given for a Gaussian variant");
}

inline ChaosReport build_chaos(const ChaosSetup& s) {
  validate(s);
  const GridSpec& g = s.grid;
  const std::size_t np = g.size(), L = s.ladder.size(), R = s.replicas;
  const double gamma = chaos_gamma(s);
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  ChaosReport out;
  out.gamma = gamma;
  out.variant = s.variant;
  out.totals.assign(R * L, 0.0);
  std::vector<double> x;  // option2 only: replica-major X = S + H per scale
  if (s.variant == ChaosVariant::option2) x.assign(L * R * np, 0.0);
  parallel_for(R, s.jobs, [&](std::size_t r) {
    auto f = sampler.sample(s.rng_seed, r);
    std::vector<double> h;
    if (s.perturbation) h = sample_holder_replica(*s.perturbation, g, s.rng_seed, r);
    for (std::size_t l = 0; l < L; ++l) {
      std::span<const double> field(f.data() + l * np, np);
      const double eps = s.ladder[l], var = std::log(1.0 / eps);
      switch (s.variant) {
        case ChaosVariant::subcritical:
          out.totals[r * L + l] = gmc_subcritical(field, var, gamma, g, eps).total();
          break;
        case ChaosVariant::critical:
          out.totals[r * L + l] = gmc_critical(field, var, g, eps).total();
          break;
        case ChaosVariant::option1:
          out.totals[r * L + l] = chaos_option1(gmc_subcritical(field, var, gamma, g, eps), h).total();
          break;
        case ChaosVariant::option2:
          for (std::size_t p = 0; p < np; ++p) x[(l * R + r) * np + p] = field[p] + h[p];
          break;
      }
    }
  });
  if (s.variant == ChaosVariant::option2) {
    for (std::size_t l = 0; l < L; ++l) {
      std::span<const double> xl(x.data() + l * R * np, R * np);
      auto norm = NormalizerTable::monte_carlo(xl, np, gamma, true);
      for (std::size_t r = 0; r < R; ++r)
        out.totals[r * L + l] = chaos_option2(xl.subspan(r * np, np), norm, g, gamma, s.ladder[l]).total();
    }
  }
  out.events = sampler.events();
  std::vector<double> col(R);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t r = 0; r < R; ++r) col[r] = out.totals[r * L + l];
    ChaosScaleSummary sum{s.ladder[l], stats::mc_mean_ci(col), std::nullopt};
    if (R >= 64) sum.tail = tail_diagnostic(col, s.tail_q);
    out.scales.push_back(sum);
  }
  return out;
}

inline io::CsvTable to_csv(const ChaosReport& r, const ScaleLadder& ladder) {
  io::CsvTable t({"replica", "epsilon", "gamma", "variant", "total_mass"});
  const std::size_t L = ladder.size();
  for (std::size_t i = 0; i < r.totals.size(); ++i)
    t.add(i / L, ladder[i % L], r.gamma, to_string(r.variant), r.totals[i]);
  return t;
}

// ---------------------------------------------------------------- counter

struct CounterSetup {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;  // the counter scale must be a ladder scale
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  double gamma = 0.5;
  bool critical = false;
  double eps = 0.0;
  std::size_t replicas = 1000;
  CounterOptions options;
  std::uint64_t rng_seed = 0;
};

inline void validate(const CounterSetup& s) {
  s.ladder.check_against(s.grid, false);
  s.ladder.index_of(s.eps);
  if (s.critical) {
    if (std::abs(s.gamma - critical_gamma(s.grid.dim())) > 1e-12)
      throw ConfigError("estimate-counter: critical runs use gamma = sqrt(2d)");
  } else if (!(s.gamma > 0.0 && s.gamma < critical_gamma(s.grid.dim()))) {
    throw PreconditionError("estimate-counter: gamma must lie in (0, sqrt(2d))");
  }
  if (s.eps > s.grid.margin() * (1.0 + 1e-12)) throw ConfigError("estimate-counter: eps exceeds the inner margin");
  if (s.replicas < s.options.min_replicas)
    throw PreconditionError("estimate-counter: need at least " + std::to_string(s.options.min_replicas) + " replicas");
}

inline CounterTerm estimate_counter(const CounterSetup& s, std::vector<std::string>* events = nullptr) {
  validate(s);
  const GridSpec& g = s.grid;
  CutoffFieldSampler sampler(g, s.seed_covariance, s.ladder, s.scheme);
  const std::size_t l = s.ladder.index_of(s.eps), np = g.size();
  const double var = std::log(1.0 / s.eps);
  Mollifier eta(g, s.eps);
  auto c = estimate_counter_term(
      [&](std::size_t r) {
        auto f = sampler.sample(s.rng_seed, r);
        std::span<const double> field(f.data() + l * np, np);
        return s.critical ? gmc_critical(field, var, g, s.eps) : gmc_subcritical(field, var, s.gamma, g, s.eps);
      },
      s.replicas, s.gamma, eta, s.options);
  if (events) *events = sampler.events();
  return c;
}

inline io::CsvTable to_csv(const CounterTerm& c, const GridSpec& g) {
  const auto inner = g.inner_points();
  io::CsvTable t(g.dim() == 1 ? std::vector<std::string>{"point", "x", "value", "se"}
                              : std::vector<std::string>{"point", "x", "y", "value", "se"});
  for (std::size_t k = 0; k < inner.size(); ++k) {
    auto x = g.position(inner[k]);
    if (g.dim() == 1)
      t.add(inner[k], x[0], c.values[k], c.se[k]);
    else
      t.add(inner[k], x[0], x[1], c.values[k], c.se[k]);
  }
  return t;
}

// ---------------------------------------------------------------- reports

inline io::CsvTable to_csv(const ConvergenceReport& r, CounterMode mode) {
  io::CsvTable t({"epsilon", "n_replicas", "l2_error", "l2_se", "corr", "counter_mode", "counter_se_max"});
  for (const auto& row : r.rows)
    t.add(row.eps, row.pairings.size(), row.l2.estimate, row.l2.se, row.corr, to_string(mode), row.counter.max_se());
  return t;
}

inline io::CsvTable to_csv(const ThickPointReport& r) {
  io::CsvTable t({"epsilon_n", "n_replicas", "rel_l2_error", "se"});
  for (const auto& row : r.rows) t.add(row.eps, row.rel_l2.n, row.rel_l2.estimate, row.rel_l2.se);
  return t;
}

inline io::CsvTable to_csv(const TransferReport& r, double gamma0, double gamma) {
  io::CsvTable t({"epsilon", "gamma0", "gamma", "rel_l2_error", "se"});
  for (const auto& row : r.rows) t.add(row.eps, gamma0, gamma, row.rel_l2.estimate, row.rel_l2.se);
  return t;
}

inline io::CsvTable gn_csv(const std::vector<std::size_t>& n, const std::vector<double>& g) {
  io::CsvTable t({"N", "g_N"});
  for (std::size_t i = 0; i < n.size(); ++i) t.add(n[i], g[i]);
  return t;
}

}  // namespace logchaos
