#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/stats/estimators.hpp"

namespace logchaos {

/// Heavy-tail diagnostic for positive samples of nu(f).
///
/// The Hill estimate of the tail index alpha uses the top k = max(10, R/50)
/// order statistics; the q-th moment is flagged as unstable when alpha < q.
/// The growth slope of max(x^q)/mean(x^q) over nested prefixes R/64..R (in
/// log-log) is reported alongside: it stays near zero for stable moments.
struct TailDiagnostic {
  double q = 2.0;
  double hill_alpha = 0.0;
  std::size_t hill_k = 0;
  double ratio_growth_slope = 0.0;
  bool heavy = false;
};

inline TailDiagnostic tail_diagnostic(std::span<const double> samples, double q) {
  const std::size_t R = samples.size();
  if (R < 64) throw PreconditionError("tail_diagnostic: need at least 64 samples");
  if (!(q > 0.0)) throw PreconditionError("tail_diagnostic: q must be positive");
  for (double x : samples)
    if (!(x > 0.0) || !std::isfinite(x)) throw PreconditionError("tail_diagnostic: samples must be positive");

  TailDiagnostic d;
  d.q = q;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  d.hill_k = std::max<std::size_t>(10, R / 50);
  double s = 0.0;
  for (std::size_t i = 0; i < d.hill_k; ++i) s += std::log(sorted[i]) - std::log(sorted[d.hill_k]);
  d.hill_alpha = s > 0.0 ? double(d.hill_k) / s : INFINITY;
  d.heavy = d.hill_alpha < q;

  std::vector<double> lr, lratio;
  for (std::size_t n = R / 64; n <= R; n *= 2) {
    if (n < 2) continue;
    double mx = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = std::pow(samples[i], q);
      mx = std::max(mx, v);
      mean += v;
    }
    mean /= n;
    lr.push_back(std::log(double(n)));
    lratio.push_back(std::log(mx / mean));
  }
  if (lr.size() >= 2) d.ratio_growth_slope = stats::slope_fit(lr, lratio).slope;
  return d;
}

}  // namespace logchaos
