#ifndef FORAGE_QUADRATURE_HPP
#define FORAGE_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

#include "forage/core.hpp"

namespace forage::quadrature {

/// Tensor-product Gauss-Legendre rule on an axis-aligned rectangle split into
/// `panels` x `panels` sub-rectangles. Accumulates K integrands at once: `f`
/// maps a point to std::array<double, K>.
template <std::size_t K, unsigned Points = 10, class F>
std::array<double, K> integrate_panels(F &&f, const Rect &r, int panels) {
  using Rule = boost::math::quadrature::gauss<double, Points>;
  const auto &x = Rule::abscissa();
  const auto &w = Rule::weights();
  // boost stores the non-negative half of a symmetric rule
  std::array<double, Points> nodes{}, weights{};
  std::size_t n = 0;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0)
      continue;
    nodes[n] = -x[i];
    weights[n++] = w[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes[n] = x[i];
    weights[n++] = w[i];
  }

  std::array<double, K> total{};
  const double hx = r.width() / panels, hy = r.height() / panels;
  for (int px = 0; px < panels; ++px) {
    const double cx = r.lo.x + (px + 0.5) * hx;
    for (int py = 0; py < panels; ++py) {
      const double cy = r.lo.y + (py + 0.5) * hy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double wt = weights[i] * weights[j] * 0.25 * hx * hy;
          const auto v = f(Vec2{cx + 0.5 * hx * nodes[i], cy + 0.5 * hy * nodes[j]});
          for (std::size_t k = 0; k < K; ++k)
            total[k] += wt * v[k];
        }
      }
    }
  }
  return total;
}

struct AdaptiveOptions {
  double tolerance = 1e-8;      // target relative change between refinements
  double accept_tolerance = 1e-6; // non-convergence threshold at max refinement
  int max_panels = 64;
};

/// Doubles the panel count until every component changes by less than
/// `tolerance` (relative to the component magnitude, or to `scale` when given).
template <std::size_t K, class F>
std::array<double, K> integrate_adaptive(F &&f, const Rect &r, const AdaptiveOptions &opt = {},
                                         std::array<double, K> scale = {}) {
  auto prev = integrate_panels<K>(f, r, 1);
  double change = 0.0;
  for (int p = 2; p <= opt.max_panels; p *= 2) {
    auto cur = integrate_panels<K>(f, r, p);
    change = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = std::max({std::abs(cur[k]), scale[k], 1e-300});
      change = std::max(change, std::abs(cur[k] - prev[k]) / denom);
    }
    prev = cur;
    if (change < opt.tolerance)
      return cur;
  }
  if (change > opt.accept_tolerance)
    throw NumericError("2D quadrature did not converge (relative change " + std::to_string(change) + ")");
  return prev;
}

} // namespace forage::quadrature

#endif // FORAGE_QUADRATURE_HPP
