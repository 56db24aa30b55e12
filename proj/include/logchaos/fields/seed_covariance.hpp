#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"

namespace logchaos {

enum class SeedProfile { triangle, lens };

inline std::string to_string(SeedProfile p) { return p == SeedProfile::triangle ? "triangle" : "lens"; }

inline SeedProfile parse_seed_profile(const std::string& name) {
  if (name == "triangle") return SeedProfile::triangle;
  if (name == "lens") return SeedProfile::lens;
  throw ConfigError("unknown seed profile '" + name + "'");
}

/// Seed covariance k1: the normalised self-convolution of the indicator of
/// the ball of radius 1/2.  Triangle in one dimension, lens in two.
class SeedCovariance {
 public:
  SeedCovariance(int dim, SeedProfile profile) : dim_(dim), profile_(profile) {}

  int dim() const { return dim_; }
  SeedProfile profile() const { return profile_; }
  std::string name() const { return to_string(profile_); }
  /// Hoelder exponent of k1 at the origin; both profiles are Lipschitz.
  double holder_exponent() const { return 1.0; }

  double operator()(double r) const {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    if (profile_ == SeedProfile::triangle) return 1.0 - r;
    return (2.0 / std::numbers::pi) * (std::acos(r) - r * std::sqrt(1.0 - r * r));
  }

 private:
  int dim_;
  SeedProfile profile_;
};

inline SeedCovariance make_seed_covariance(int dim, SeedProfile profile) {
  if (dim == 1 && profile == SeedProfile::triangle) return {1, profile};
  if (dim == 2 && profile == SeedProfile::lens) return {2, profile};
  if (dim != 1 && dim != 2)
    throw ConfigError("seed covariance: unsupported dimension " + std::to_string(dim));
  throw ConfigError("seed covariance: profile '" + to_string(profile) + "' is not defined for d=" +
                    std::to_string(dim));
}

inline SeedCovariance make_seed_covariance(int dim, const std::string& profile) {
  return make_seed_covariance(dim, parse_seed_profile(profile));
}

struct DefinitenessReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool positive = false;
};

/// Spectrum of the kernel matrix k1(|x_i - x_j|) over all grid points.
/// Positive when the smallest eigenvalue is >= -1e-8 times the largest.
inline DefinitenessReport certify_positive_definite(const SeedCovariance& seed, const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b <= a; ++b)
      k(a, b) = k(b, a) = seed(grid.distance(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen decomposition failed");
  DefinitenessReport out;
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  out.max_eigenvalue = solver.eigenvalues().maxCoeff();
  out.positive = out.min_eigenvalue >= -1e-8 * out.max_eigenvalue;
  return out;
}

}  // namespace logchaos
