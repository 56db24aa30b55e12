#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"

namespace logchaos {

/// Cell-centred discretisation of the box [0, L]^d, d in {1, 2}.
///
/// Points are stored point-major with the first axis slowest:
/// index = i0 * n + i1 in two dimensions.  Coordinates are cell centres
/// x_i = (i + 1/2) h.  The inner box [m, L - m]^d is where test functions
/// and mollified quantities live.
class GridSpec {
 public:
  GridSpec() = default;

  GridSpec(int dim, double side, int points, double margin)
      : dim_(dim), side_(side), points_(points), margin_(margin) {
    if (dim != 1 && dim != 2)
      throw ConfigError("grid: dimension must be 1 or 2, got " + std::to_string(dim));
    if (points < 4) throw ConfigError("grid: need at least 4 points per axis");
    if (!(side > 0.0) || !std::isfinite(side)) throw ConfigError("grid: side must be positive");
    if (!(margin > 0.0) || !(margin < side / 2.0))
      throw ConfigError("grid: margin must lie in (0, L/2)");
  }

  int dim() const { return dim_; }
  double side() const { return side_; }
  int points_per_axis() const { return points_; }
  double margin() const { return margin_; }
  double spacing() const { return side_ / points_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double volume() const { return std::pow(side_, dim_); }

  std::size_t size() const {
    return dim_ == 1 ? static_cast<std::size_t>(points_)
                     : static_cast<std::size_t>(points_) * static_cast<std::size_t>(points_);
  }

  double coordinate(int i) const { return (i + 0.5) * spacing(); }

  std::array<int, 2> unravel(std::size_t index) const {
    if (dim_ == 1) return {static_cast<int>(index), 0};
    return {static_cast<int>(index / points_), static_cast<int>(index % points_)};
  }

  std::size_t ravel(int i0, int i1 = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(i0)
                     : static_cast<std::size_t>(i0) * points_ + static_cast<std::size_t>(i1);
  }

  std::array<double, 2> position(std::size_t index) const {
    auto ij = unravel(index);
    return {coordinate(ij[0]), dim_ == 2 ? coordinate(ij[1]) : 0.0};
  }

  double distance(std::size_t a, std::size_t b) const {
    auto pa = position(a);
    auto pb = position(b);
    double dx = pa[0] - pb[0];
    double dy = pa[1] - pb[1];
    return std::sqrt(dx * dx + dy * dy);
  }

  bool in_inner_box(std::size_t index) const {
    auto p = position(index);
    for (int a = 0; a < dim_; ++a)
      if (p[a] < margin_ || p[a] > side_ - margin_) return false;
    return true;
  }

  /// Indices of all points inside the inner box, in storage order.
  std::vector<std::size_t> inner_points() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
      if (in_inner_box(k)) out.push_back(k);
    return out;
  }

  /// Index of the grid point closest to the box centre (ties to the upper cell).
  std::size_t centre_index() const {
    int c = points_ / 2;
    return dim_ == 1 ? ravel(c) : ravel(c, c);
  }

 private:
  int dim_ = 1;
  double side_ = 1.0;
  int points_ = 4;
  double margin_ = 0.25;
};

}  // namespace logchaos
