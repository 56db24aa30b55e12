#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"

namespace logchaos {

/// Quartic bump eta(u) proportional to (1 - |u|^2)^2 on |u| < 1, scaled to
/// eta_eps(y) = eps^-d eta(y / eps) and renormalised on the grid so that
/// sum_i eta_eps(x_i - x) h^d = 1 for every admissible centre x.
class Mollifier {
 public:
  Mollifier(const GridSpec& grid, double eps) : grid_(grid), eps_(eps) {
    if (!(eps > 0.0)) throw DomainError("mollifier: scale must be positive");
    const double h = grid.spacing();
    const int reach = static_cast<int>(std::ceil(eps / h));
    const int span1 = grid.dim() == 2 ? reach : 0;
    double sum = 0.0;
    for (int a = -reach; a <= reach; ++a)
      for (int b = -span1; b <= span1; ++b) {
        double r = std::hypot(a * h, b * h) / eps;
        if (r >= 1.0) continue;
        double w = (1.0 - r * r) * (1.0 - r * r);
        offsets_.push_back({a, b});
        weights_.push_back(w);
        sum += w;
      }
    if (sum <= 0.0) throw ConfigError("mollifier: scale below the grid spacing");
    const double norm = 1.0 / (sum * grid.cell_volume());
    for (double& w : weights_) w *= norm;
    reach_ = reach;
  }

  static const char* profile() { return "quartic-bump"; }
  double scale() const { return eps_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<std::array<int, 2>>& offsets() const { return offsets_; }
  const std::vector<double>& weights() const { return weights_; }

  /// True when the whole stencil around `center` lies on the grid.
  bool fits(std::size_t center) const {
    auto ij = grid_.unravel(center);
    const int n = grid_.points_per_axis();
    for (int a = 0; a < grid_.dim(); ++a)
      if (ij[a] - reach_ < 0 || ij[a] + reach_ >= n) return false;
    return true;
  }

  /// sum_k w_k values[center + offset_k], without bounds checks.
  double apply(const double* values, std::size_t center) const {
    auto ij = grid_.unravel(center);
    double s = 0.0;
    for (std::size_t k = 0; k < offsets_.size(); ++k)
      s += weights_[k] * values[grid_.ravel(ij[0] + offsets_[k][0], ij[1] + offsets_[k][1])];
    return s;
  }

 private:
  GridSpec grid_;
  double eps_;
  int reach_ = 0;
  std::vector<std::array<int, 2>> offsets_;
  std::vector<double> weights_;
};

}  // namespace logchaos
