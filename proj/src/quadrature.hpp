#pragma once

#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dampsim::detail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive 31-point Gauss-Kronrod over the panels given by
/// `breaks`: repeatedly bisects the panel with the largest error until the
/// summed error is below rel_tol * |value| or the panel budget runs out.
///
/// Boost's own adaptive driver is not used because the 1.74 headers report
/// the per-panel error in reference coordinates (unscaled by the panel half
/// width), which over-refines short panels and inflates the error sum.
template <class F>
QuadratureResult adaptive_integrate(F f, const std::vector<double>& breaks, double rel_tol,
                                    int max_panels = 4000) {
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    const double v = rule::integrate(f, a, b, 0, 0.0, &err);
    return Panel{a, b, v, err * 0.5 * (b - a)};
  };

  std::priority_queue<Panel> queue;
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    const Panel p = eval(breaks[i], breaks[i + 1]);
    out.value += p.value;
    out.error += p.error;
    queue.push(p);
  }
  int panels = static_cast<int>(queue.size());
  while (!queue.empty() && std::isfinite(out.value) && out.error > rel_tol * std::abs(out.value) &&
         panels < max_panels) {
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    const Panel left = eval(worst.a, mid), right = eval(mid, worst.b);
    out.value += left.value + right.value - worst.value;
    out.error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  // Re-sum to drop the drift of the running updates.
  out.value = 0.0;
  out.error = 0.0;
  while (!queue.empty()) {
    out.value += queue.top().value;
    out.error += queue.top().error;
    queue.pop();
  }
  return out;
}

}  // namespace dampsim::detail
