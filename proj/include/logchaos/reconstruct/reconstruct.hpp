#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/mollifier.hpp"
#include "logchaos/parallel.hpp"

namespace logchaos {

/// Product bump psi(x) = prod_a exp(1 - 1/(1 - t_a^2)), t_a mapping the
/// inner interval (m, L - m) onto (-1, 1).  Zero outside the inner box.
class TestFunction {
 public:
  explicit TestFunction(const GridSpec& grid) : grid_(grid), table_(grid.size(), 0.0) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      auto x = grid.position(p);
      table_[p] = (*this)(x[0], x[1]);
    }
    if (degenerate()) throw ConfigError("test function vanishes on every grid point; refine the grid or shrink the margin");
  }

  /// Arbitrary grid table; must vanish outside the inner box.
  static TestFunction from_table(const GridSpec& grid, std::vector<double> table) {
    if (table.size() != grid.size()) throw ConfigError("test function: table size mismatch");
    for (std::size_t p = 0; p < table.size(); ++p)
      if (table[p] != 0.0 && !grid.in_inner_box(p)) throw ConfigError("test function: support leaves the inner box");
    TestFunction psi;
    psi.grid_ = grid;
    psi.table_ = std::move(table);
    return psi;
  }

  bool degenerate() const {
    for (double v : table_)
      if (v != 0.0) return false;
    return true;
  }

  double operator()(double x, double y = 0.0) const {
    double v = bump(x);
    if (grid_.dim() == 2) v *= bump(y);
    return v;
  }

  const std::vector<double>& table() const { return table_; }
  const GridSpec& grid() const { return grid_; }

  /// sum_x psi(x) h^d.
  double mass() const {
    double s = 0.0;
    for (double v : table_) s += v;
    return s * grid_.cell_volume();
  }

  /// <f, psi> on the grid.
  double pair(std::span<const double> f) const {
    if (f.size() != table_.size()) throw ConfigError("test function: field size mismatch");
    double s = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) s += table_[p] * f[p];
    return s * grid_.cell_volume();
  }

 private:
  TestFunction() = default;

  double bump(double x) const {
    const double m = grid_.margin(), L = grid_.side();
    double t = 2.0 * (x - m) / (L - 2.0 * m) - 1.0;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  }

  GridSpec grid_;
  std::vector<double> table_;
};

/// Values of (1/gamma) log(int eta_eps(y - x) nu(dy)) on the inner grid points
/// (in GridSpec::inner_points() order).
inline std::vector<double> log_smoothed_field(const ChaosMeasure& nu, double gamma, const Mollifier& eta) {
  if (!(gamma > 0.0)) throw PreconditionError("log_smoothed_field: gamma must be > 0");
  const auto inner = nu.grid.inner_points();
  std::vector<double> out(inner.size());
  for (std::size_t k = 0; k < inner.size(); ++k) out[k] = std::log(smooth_at(nu, eta, inner[k])) / gamma;
  return out;
}

enum class CounterMode { per_point, pooled };

inline std::string to_string(CounterMode m) { return m == CounterMode::per_point ? "per-point" : "pooled"; }

inline CounterMode parse_counter_mode(const std::string& s) {
  if (s == "per-point") return CounterMode::per_point;
  if (s == "pooled") return CounterMode::pooled;
  throw ConfigError("unknown counter mode '" + s + "'");
}

/// Estimate of F_{gamma,eps,eta} on the inner grid points.
struct CounterTerm {
  double gamma = 0.0;
  double eps = 0.0;
  std::string mollifier = Mollifier::profile();
  CounterMode mode = CounterMode::per_point;
  std::vector<double> values;  // one per inner point (constant in pooled mode)
  std::vector<double> se;
  std::size_t replicas = 0;

  double max_se() const {
    double m = 0.0;
    for (double s : se) m = std::max(m, s);
    return m;
  }

  /// Exactly known counter (no Monte Carlo), e.g. for deterministic measures.
  static CounterTerm exact(double gamma, double eps, std::vector<double> values) {
    CounterTerm c;
    c.gamma = gamma;
    c.eps = eps;
    c.se.assign(values.size(), 0.0);
    c.values = std::move(values);
    return c;
  }
};

struct CounterOptions {
  CounterMode mode = CounterMode::per_point;
  double se_cap = 0.05;
  std::size_t min_replicas = 100;
  unsigned jobs = 1;
};

/// Counter term from precomputed log-smoothed fields (replica-major, inner points).
inline CounterTerm counter_from_samples(std::span<const double> a, std::size_t replicas, double gamma,
                                        const Mollifier& eta, const CounterOptions& opt = {}) {
  if (replicas < 2) throw PreconditionError("counter term: need at least 2 replicas");
  const std::size_t width = a.size() / replicas;
  CounterTerm c;
  c.gamma = gamma;
  c.eps = eta.scale();
  c.mode = opt.mode;
  c.replicas = replicas;
  const double R = static_cast<double>(replicas);
  if (opt.mode == CounterMode::pooled) {
    std::vector<double> per(replicas, 0.0);
    for (std::size_t r = 0; r < replicas; ++r) {
      for (std::size_t k = 0; k < width; ++k) per[r] += a[r * width + k];
      per[r] /= width;
    }
    double m = 0.0, ss = 0.0;
    for (double v : per) m += v;
    m /= R;
    for (double v : per) ss += (v - m) * (v - m);
    c.values.assign(width, m);
    c.se.assign(width, std::sqrt(ss / (R - 1) / R));
  } else {
    c.values.assign(width, 0.0);
    c.se.assign(width, 0.0);
    for (std::size_t r = 0; r < replicas; ++r)
      for (std::size_t k = 0; k < width; ++k) c.values[k] += a[r * width + k];
    for (double& v : c.values) v /= R;
    for (std::size_t r = 0; r < replicas; ++r)
      for (std::size_t k = 0; k < width; ++k) {
        double d = a[r * width + k] - c.values[k];
        c.se[k] += d * d;
      }
    for (double& s : c.se) s = std::sqrt(s / (R - 1) / R);
  }
  if (c.max_se() > opt.se_cap)
    throw QualityError("counter term SE " + std::to_string(c.max_se()) + " exceeds cap " +
                       std::to_string(opt.se_cap) + "; increase the replica count");
  return c;
}

/// Replica mean of the log-smoothed chaos.  `measure(r)` returns the chaos
/// measure of replica r; replicas are visited in any order but reduced in
/// index order.
template <typename Source>
CounterTerm estimate_counter_term(Source&& measure, std::size_t replicas, double gamma, const Mollifier& eta,
                                  const CounterOptions& opt = {}) {
  if (replicas < opt.min_replicas)
    throw PreconditionError("estimate_counter_term: need at least " + std::to_string(opt.min_replicas) +
                            " replicas");
  const std::size_t width = eta.grid().inner_points().size();
  std::vector<double> a(replicas * width);
  parallel_for(replicas, opt.jobs, [&](std::size_t r) {
    auto v = log_smoothed_field(measure(r), gamma, eta);
    std::copy(v.begin(), v.end(), a.begin() + r * width);
  });
  return counter_from_samples(a, replicas, gamma, eta, opt);
}

/// <R_eps, psi> = sum_x psi(x) (A(x) - F(x)) h^d over the inner grid.
inline double reconstruct_pairing(const ChaosMeasure& nu, const CounterTerm& counter, const TestFunction& psi,
                                  const Mollifier& eta) {
  if (std::abs(counter.gamma - nu.gamma) > 1e-12 * std::max(1.0, nu.gamma))
    throw ConfigError("reconstruct_pairing: counter gamma differs from the measure's");
  if (std::abs(counter.eps - eta.scale()) > 1e-12 || std::abs(counter.eps - nu.eps) > 1e-12 ||
      counter.mollifier != Mollifier::profile())
    throw ConfigError("reconstruct_pairing: counter built for a different mollifier or scale");
  const auto inner = nu.grid.inner_points();
  if (counter.values.size() != inner.size()) throw ConfigError("reconstruct_pairing: counter grid mismatch");
  auto a = log_smoothed_field(nu, nu.gamma, eta);
  double s = 0.0;
  for (std::size_t k = 0; k < inner.size(); ++k) s += psi.table()[inner[k]] * (a[k] - counter.values[k]);
  return s * nu.grid.cell_volume();
}

/// F_G = F_S + (gamma/2)(g_S(x,x) - g_G(x,x)).  Diagonals are per inner point
/// or a single shared value.
inline CounterTerm gaussian_shift_counter(const CounterTerm& counter_s, double gamma, std::span<const double> g_s,
                                          std::span<const double> g_g) {
  if (g_s.empty() || g_g.empty())
    throw ConfigError("gaussian_shift_counter: diagonal of g unavailable; estimate the counter directly");
  const std::size_t n = counter_s.values.size();
  auto at = [n](std::span<const double> g, std::size_t k) {
    if (g.size() == 1) return g[0];
    if (g.size() != n) throw ConfigError("gaussian_shift_counter: diagonal size mismatch");
    return g[k];
  };
  CounterTerm out = counter_s;
  for (std::size_t k = 0; k < n; ++k) out.values[k] += 0.5 * gamma * (at(g_s, k) - at(g_g, k));
  return out;
}

}  // namespace logchaos
