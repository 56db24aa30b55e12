#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "logchaos/errors.hpp"

namespace logchaos::quadrature {

/// Absolute tolerance used for every covariance integral in the library.
inline constexpr double kAbsTolerance = 1e-10;

/// Globally adaptive Gauss-Kronrod (21 point) integral of f over [a, b].
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops below `tol`.  Breakpoints mark kinks of the integrand.
/// Throws NumericalError when the segment budget runs out first.
template <typename F>
double integrate(F&& f, double a, double b, std::vector<double> breakpoints = {},
                 double tol = kAbsTolerance, std::size_t max_segments = 4000) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    double error = 0.0;
    double v = Rule::integrate(f, lo, hi, 0, 0.0, &error);
    return Segment{lo, hi, v, error};
  };

  std::vector<double> knots{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double p : breakpoints)
    if (p > a && p < b && p - knots.back() > 1e-14) knots.push_back(p);
  knots.push_back(b);

  std::priority_queue<Segment> queue;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) queue.push(eval(knots[k], knots[k + 1]));
  auto summed_error = [&] {
    auto copy = queue;
    double e = 0.0;
    while (!copy.empty()) {
      e += copy.top().error;
      copy.pop();
    }
    return e;
  };
  double total_error = summed_error();
  while (total_error > tol && queue.size() < max_segments) {
    Segment worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.lo + worst.hi);
    Segment left = eval(worst.lo, mid), right = eval(mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    if (total_error <= tol) total_error = summed_error();  // guard against drift
  }
  double total = 0.0;
  std::vector<Segment> parts;
  while (!queue.empty()) {
    parts.push_back(queue.top());
    queue.pop();
  }
  std::sort(parts.begin(), parts.end(), [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (const auto& s : parts) total += s.value;
  if (!(total_error <= tol) || !std::isfinite(total)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "quadrature: error estimate %.3g exceeds tolerance %.3g", total_error, tol);
    throw NumericalError(msg);
  }
  return sign * total;
}

/// Mean of a smooth 1-periodic function over one period, by the trapezoid
/// rule with node doubling until successive estimates agree to `tol`.
template <typename F>
double periodic_mean(F&& f, double tol = kAbsTolerance, int min_nodes = 16,
                     int max_nodes = 1 << 22) {
  auto rule = [&](int nodes) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) s += f(static_cast<double>(i) / nodes);
    return s / nodes;
  };
  int nodes = min_nodes;
  double previous = rule(nodes);
  while (nodes < max_nodes) {
    nodes *= 2;
    double current = rule(nodes);
    if (std::abs(current - previous) <= tol) return current;
    previous = current;
  }
  throw NumericalError("periodic_mean: no convergence within node budget");
}

}  // namespace logchaos::quadrature
