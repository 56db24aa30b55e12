#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/rng.hpp"

namespace logchaos {

enum class CoefficientLaw { uniform, gaussian };

inline CoefficientLaw parse_coefficient_law(const std::string& s) {
  if (s == "uniform") return CoefficientLaw::uniform;
  if (s == "gaussian") return CoefficientLaw::gaussian;
  throw ConfigError("unknown coefficient law '" + s + "'");
}

/// Smooth random Fourier series H(x) = sum_m sigma_m (a_m cos(w_m x_k) + b_m sin(w_m x_k)),
/// sigma_m = c / m^2, w_m = 2 pi m / L, with term m acting along axis k = (m-1) mod d.
/// Uniform coefficients on [-1,1] give a deterministic bound; Gaussian ones
/// make H an independent Gaussian field with closed-form variance.
struct HolderFieldSpec {
  int order = 8;
  double amplitude = 0.0;
  CoefficientLaw law = CoefficientLaw::uniform;

  double sigma(int m) const { return amplitude / (double(m) * m); }

  /// 2 c sum m^-2; only meaningful for the uniform law.
  double bound() const {
    double s = 0.0;
    for (int m = 1; m <= order; ++m) s += 2.0 * std::abs(sigma(m));
    return s;
  }

  /// Pointwise variance; the same at every x.
  double variance() const {
    double s = 0.0;
    for (int m = 1; m <= order; ++m) s += sigma(m) * sigma(m);
    return law == CoefficientLaw::uniform ? s / 3.0 : s;
  }
};

/// One replica of H on the grid.
inline std::vector<double> sample_holder_replica(const HolderFieldSpec& spec, const GridSpec& grid,
                                                 std::uint64_t rng_seed, std::uint64_t replica) {
  if (spec.order < 1) throw ConfigError("holder: order must be >= 1");
  ReplicaStream rng(rng_seed, replica, StreamPurpose::holder_field);
  std::vector<double> h(grid.size(), 0.0);
  for (int m = 1; m <= spec.order; ++m) {
    double a, b;
    if (spec.law == CoefficientLaw::uniform) {
      a = rng.uniform(-1.0, 1.0);
      b = rng.uniform(-1.0, 1.0);
    } else {
      a = rng.normal();
      b = rng.normal();
    }
    const int axis = (m - 1) % grid.dim();
    const double w = 2.0 * std::numbers::pi * m / grid.side();
    const double s = spec.sigma(m);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double x = grid.position(p)[axis];
      h[p] += s * (a * std::cos(w * x) + b * std::sin(w * x));
    }
  }
  return h;
}

/// Replica-major samples of H.
inline std::vector<double> sample_holder_field(const HolderFieldSpec& spec, const GridSpec& grid,
                                               std::size_t replicas, std::uint64_t rng_seed, unsigned jobs = 1) {
  std::vector<double> out(replicas * grid.size());
  parallel_for(replicas, jobs, [&](std::size_t r) {
    auto h = sample_holder_replica(spec, grid, rng_seed, r);
    std::copy(h.begin(), h.end(), out.begin() + r * grid.size());
  });
  return out;
}

}  // namespace logchaos
