#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logchaos/errors.hpp"

namespace logchaos::stats {

/// A Monte Carlo estimate with its standard error.
struct StatReport {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n = 0;

  double ci_low() const { return estimate - 1.96 * se; }
  double ci_high() const { return estimate + 1.96 * se; }
  /// |estimate - target| <= k * se.
  bool within(double target, double k = 3.0) const { return std::abs(estimate - target) <= k * se; }
};

inline StatReport mc_mean_ci(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw PreconditionError("mc_mean_ci: need at least 2 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n)), n};
}

inline StatReport mc_mean_ci(const std::vector<double>& samples) {
  return mc_mean_ci(std::span<const double>(samples));
}

/// Two estimates agree when their difference is within k combined SEs.
inline bool agree(const StatReport& a, const StatReport& b, double k = 3.0) {
  return std::abs(a.estimate - b.estimate) <= k * std::hypot(a.se, b.se);
}

/// Covariance of paired samples with a jackknife standard error.
/// The leave-one-out estimates are computed in O(n) from running sums.
inline StatReport covariance(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw PreconditionError("covariance: length mismatch");
  if (n < 30) throw PreconditionError("covariance: need at least 30 replicas");
  double sx = 0.0, sy = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sx += x[r];
    sy += y[r];
  }
  const double mx = sx / n, my = sy / n;
  // Centred sums; leave-one-out stays exact after shifting by a constant.
  double a = 0.0, b = 0.0, sxy = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    a += x[r] - mx;
    b += y[r] - my;
    sxy += (x[r] - mx) * (y[r] - my);
  }
  const double full = (sxy - a * b / n) / (n - 1);
  const double m = static_cast<double>(n - 1);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double xr = x[r] - mx, yr = y[r] - my;
    double ai = a - xr, bi = b - yr, si = sxy - xr * yr;
    loo[r] = (si - ai * bi / m) / (m - 1);
    loo_mean += loo[r];
  }
  loo_mean /= n;
  double var = 0.0;
  for (double v : loo) var += (v - loo_mean) * (v - loo_mean);
  var *= m / n;
  return {full, std::sqrt(var), n};
}

/// Replica vectors stored row-major as (replica, coordinate).
struct ReplicaMatrix {
  std::span<const double> data;
  std::size_t replicas;
  std::size_t width;
};

/// Covariance estimates for each requested coordinate pair.
inline std::vector<StatReport> empirical_cov(const ReplicaMatrix& m,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (m.data.size() != m.replicas * m.width) throw PreconditionError("empirical_cov: shape mismatch");
  std::vector<StatReport> out;
  std::vector<double> xa(m.replicas), xb(m.replicas);
  for (auto [i, j] : pairs) {
    if (i >= m.width || j >= m.width) throw PreconditionError("empirical_cov: index out of range");
    for (std::size_t r = 0; r < m.replicas; ++r) {
      xa[r] = m.data[r * m.width + i];
      xb[r] = m.data[r * m.width + j];
    }
    out.push_back(covariance(xa, xb));
  }
  return out;
}

/// E[(a - b)^2] with SE.
inline StatReport l2_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("l2_error: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) d[r] = (a[r] - b[r]) * (a[r] - b[r]);
  return mc_mean_ci(d);
}

/// sqrt(E[(a - b)^2] / E[b^2]); SE by the delta method on the ratio.
inline StatReport relative_l2_error(std::span<const double> a, std::span<const double> ref) {
  const std::size_t n = a.size();
  if (n != ref.size() || n < 2) throw PreconditionError("relative_l2_error: bad lengths");
  double md = 0.0, mr = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    md += (a[r] - ref[r]) * (a[r] - ref[r]);
    mr += ref[r] * ref[r];
  }
  md /= n;
  mr /= n;
  if (mr == 0.0) throw PreconditionError("relative_l2_error: reference is identically zero");
  const double q = md / mr;
  double ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double z = (a[r] - ref[r]) * (a[r] - ref[r]) - q * ref[r] * ref[r];
    ss += z * z;
  }
  const double se_q = std::sqrt(ss / (n - 1) / n) / mr;
  const double v = std::sqrt(q);
  return {v, v > 0.0 ? se_q / (2.0 * v) : 0.0, n};
}

/// Pearson correlation of paired samples.
inline double correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) throw PreconditionError("correlation: bad lengths");
  double ma = 0.0, mb = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    ma += a[r];
    mb += b[r];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    saa += (a[r] - ma) * (a[r] - ma);
    sbb += (b[r] - mb) * (b[r] - mb);
    sab += (a[r] - ma) * (b[r] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw PreconditionError("correlation: constant input");
  return sab / std::sqrt(saa * sbb);
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope * x.
inline SlopeFit slope_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw PreconditionError("slope_fit: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("slope_fit: x values are all equal");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    rss += r * r;
  }
  f.slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return f;
}

struct GaussianityReport {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double skew_z = 0.0;
  double kurtosis_z = 0.0;
  bool plausible(double k = 3.0) const { return std::abs(skew_z) < k && std::abs(kurtosis_z) < k; }
};

/// Sample skewness and excess kurtosis with their large-n z-scores.
inline GaussianityReport gaussianity_check(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) throw PreconditionError("gaussianity_check: need at least 8 samples");
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0.0) throw PreconditionError("gaussianity_check: constant sample");
  GaussianityReport g;
  g.skewness = m3 / std::pow(m2, 1.5);
  g.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  g.skew_z = g.skewness / std::sqrt(6.0 / n);
  g.kurtosis_z = g.excess_kurtosis / std::sqrt(24.0 / n);
  return g;
}

}  // namespace logchaos::stats
