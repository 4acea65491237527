#include "qcausal/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcausal {

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, double step, int max_iterations, double tol) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2;
    std::vector<double> v2;
    for (auto i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += (pts[i][k] - pts[0][k]) * (pts[i][k] - pts[0][k]);
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };
  auto along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (worst[k] - centroid[k]);
    return x;
  };

  int it = 0;
  sort_simplex();
  for (; it < max_iterations; ++it) {
    if (diameter() < tol) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);

    const auto xr = along(centroid, pts[n], -1.0);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const auto xe = along(centroid, pts[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const auto xc = along(centroid, pts[n], outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          vals[i] = f(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  return {pts[0], vals[0], it};
}

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // The endpoints are candidates too; a minimum on the boundary is common.
  ScalarMinimum best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double x : {lo, hi}) {
    if (std::abs(x - best.x) <= tol) {
      const double fx = f(x);
      if (fx < best.value) best = {x, fx};
    }
  }
  return best;
}

}  // namespace qcausal
