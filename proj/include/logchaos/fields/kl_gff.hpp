#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/rng.hpp"

namespace logchaos {

/// Truncated Karhunen-Loeve expansion of the GFF on [0,1]^2:
/// G_N = sum_{k,l <= N} A_{kl} lambda_{kl}^{-1/2} phi_{kl}, with
/// lambda_{kl} = pi^2 (k^2 + l^2) / 2 and phi_{kl} = 2 sin(k pi x) sin(l pi y).
struct KLFieldSpec {
  int modes = 1;

  static double eigenvalue(int k, int l) { return 0.5 * std::numbers::pi * std::numbers::pi * (k * k + l * l); }
  static double eigenfunction(int k, int l, double x, double y) {
    return 2.0 * std::sin(k * std::numbers::pi * x) * std::sin(l * std::numbers::pi * y);
  }
  static const char* convention() { return "lambda_kl = pi^2 (k^2 + l^2) / 2, eigenvalues of covariance 1/lambda_kl"; }
};

struct GffSamples {
  GridSpec grid;
  std::size_t replicas = 0;
  std::vector<double> values;    // replica-major, point-major
  std::vector<double> variance;  // exact sigma_N^2 per point
  const double* field(std::size_t r) const { return values.data() + r * grid.size(); }
};

namespace detail {

inline Eigen::MatrixXd kl_sine_table(const GridSpec& grid, int modes) {
  const int n = grid.points_per_axis();
  Eigen::MatrixXd s(n, modes);
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= modes; ++k) s(i, k - 1) = std::sin(k * std::numbers::pi * grid.coordinate(i));
  return s;
}

inline void check_kl_grid(const KLFieldSpec& spec, const GridSpec& grid) {
  if (spec.modes < 1) throw ConfigError("kl: mode cutoff must be >= 1");
  if (grid.dim() != 2 || std::abs(grid.side() - 1.0) > 1e-12)
    throw ConfigError("kl: the GFF expansion lives on the unit square (d=2, L=1)");
}

}  // namespace detail

/// sigma_N^2(x) = sum lambda^{-1} phi^2, summed exactly over the truncation.
inline std::vector<double> kl_variance_table(const KLFieldSpec& spec, const GridSpec& grid) {
  detail::check_kl_grid(spec, grid);
  const int n = grid.points_per_axis();
  Eigen::MatrixXd s = detail::kl_sine_table(grid, spec.modes);
  Eigen::MatrixXd inv(spec.modes, spec.modes);
  for (int k = 1; k <= spec.modes; ++k)
    for (int l = 1; l <= spec.modes; ++l) inv(k - 1, l - 1) = 4.0 / KLFieldSpec::eigenvalue(k, l);
  Eigen::MatrixXd s2 = s.array().square().matrix();
  Eigen::MatrixXd var = s2 * inv * s2.transpose();
  std::vector<double> out(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[grid.ravel(i, j)] = var(i, j);
  return out;
}

inline GffSamples sample_gff_kl(const KLFieldSpec& spec, const GridSpec& grid, std::size_t replicas,
                                std::uint64_t rng_seed, unsigned jobs = 1) {
  detail::check_kl_grid(spec, grid);
  const int n = grid.points_per_axis();
  const int N = spec.modes;
  Eigen::MatrixXd s = detail::kl_sine_table(grid, N);
  Eigen::MatrixXd scale(N, N);
  for (int k = 1; k <= N; ++k)
    for (int l = 1; l <= N; ++l) scale(k - 1, l - 1) = 2.0 / std::sqrt(KLFieldSpec::eigenvalue(k, l));

  GffSamples out{grid, replicas, std::vector<double>(replicas * grid.size()), kl_variance_table(spec, grid)};
  parallel_for(replicas, jobs, [&](std::size_t r) {
    ReplicaStream rng(rng_seed, r, StreamPurpose::kl_field);
    Eigen::MatrixXd a(N, N);
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) a(k, l) = rng.normal() * scale(k, l);
    Eigen::MatrixXd g = s * a * s.transpose();
    double* dst = out.values.data() + r * grid.size();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dst[grid.ravel(i, j)] = g(i, j);
  });
  return out;
}

}  // namespace logchaos
