#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"

namespace logchaos {

/// Strictly decreasing scales eps_0 > eps_1 > ... > eps_J in (0,1).
class ScaleLadder {
 public:
  ScaleLadder() = default;

  explicit ScaleLadder(std::vector<double> scales) : scales_(std::move(scales)) {
    if (scales_.empty()) throw ConfigError("ladder: no scales");
    for (std::size_t j = 0; j < scales_.size(); ++j) {
      if (!(scales_[j] > 0.0 && scales_[j] < 1.0))
        throw ConfigError("ladder: scale " + std::to_string(scales_[j]) + " outside (0,1)");
      if (j > 0 && !(scales_[j] < scales_[j - 1]))
        throw ConfigError("ladder: scales must be strictly decreasing");
    }
  }

  /// `count` scales eps0 * 2^-j, j = 0..count-1.
  static ScaleLadder dyadic(double eps0, int count) {
    if (count < 1) throw ConfigError("ladder: need at least one level");
    std::vector<double> s;
    for (int j = 0; j < count; ++j) s.push_back(std::ldexp(eps0, -j));
    return ScaleLadder(std::move(s));
  }

  std::size_t size() const { return scales_.size(); }
  double operator[](std::size_t j) const { return scales_.at(j); }
  double finest() const { return scales_.back(); }
  double coarsest() const { return scales_.front(); }
  const std::vector<double>& scales() const { return scales_; }

  /// Position of eps in the ladder; relative tolerance 1e-12.
  std::size_t index_of(double eps) const {
    for (std::size_t j = 0; j < scales_.size(); ++j)
      if (std::abs(scales_[j] - eps) <= 1e-12 * scales_[j]) return j;
    throw ConfigError("ladder: scale " + std::to_string(eps) + " is not on the ladder");
  }

  /// Throws unless the finest scale resolves at least two cells and, when
  /// asked, every scale is an integer multiple of the spacing.
  void check_against(const GridSpec& grid, bool commensurate) const {
    const double h = grid.spacing();
    if (finest() < 2.0 * h * (1.0 - 1e-12))
      throw ConfigError("ladder: finest scale " + std::to_string(finest()) + " below 2h = " +
                        std::to_string(2.0 * h));
    if (!commensurate) return;
    for (double e : scales_) {
      double q = e / h;
      if (std::abs(q - std::round(q)) > 1e-9)
        throw ConfigError("ladder: scale " + std::to_string(e) + " is not a multiple of h = " +
                          std::to_string(h));
    }
  }

 private:
  std::vector<double> scales_;
};

}  // namespace logchaos
