#pragma once

// Derivative-free local minimization (Nelder-Mead simplex).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "qlab/linalg.hpp"

namespace qlab {

struct NelderMeadOptions {
  double initial_step = 0.5;
  // Stop once every vertex lies within this distance of the best vertex.
  double diameter_tolerance = 1e-8;
  // Also stop once the spread of simplex values falls to this level (0 disables).
  double value_tolerance = 0.0;
  std::size_t max_evaluations = 500;
  // Dimension-dependent coefficients (Gao & Han); plain coefficients otherwise.
  bool adaptive = true;
};

struct NelderMeadResult {
  RealVector x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes f starting from an axis-aligned simplex around x0.
template <class F>
NelderMeadResult nelder_mead(F&& f, const RealVector& x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  NelderMeadResult res;
  if (n == 0) {
    res.x = x0;
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = opts.adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double rho = opts.adaptive ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
  const double sigma = opts.adaptive ? 1.0 - 1.0 / dn : 0.5;

  std::vector<RealVector> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  std::size_t evals = 0;
  auto eval = [&](const RealVector& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opts.initial_step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  RealVector centroid(n), xr(n), xe(n), xc(n);
  bool converged = false;

  while (evals < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double dx = pts[i][k] - pts[best][k];
        d2 += dx * dx;
      }
      diameter = std::max(diameter, std::sqrt(d2));
    }
    const double spread = vals[worst] - vals[best];
    if (diameter <= opts.diameter_tolerance ||
        (opts.value_tolerance > 0.0 && spread <= opts.value_tolerance)) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
    }
    for (auto& c : centroid) c /= dn;

    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - pts[worst][k]);
    const double fr = eval(xr);

    if (fr < vals[best]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + gamma * (xr[k] - centroid[k]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second_worst]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < vals[worst];
    for (std::size_t k = 0; k < n; ++k) {
      xc[k] = outside ? centroid[k] + rho * (xr[k] - centroid[k])
                      : centroid[k] + rho * (pts[worst][k] - centroid[k]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        pts[i][k] = pts[best][k] + sigma * (pts[i][k] - pts[best][k]);
      vals[i] = eval(pts[i]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  res.x = pts[static_cast<std::size_t>(it - vals.begin())];
  res.value = *it;
  res.evaluations = evals;
  res.converged = converged;
  return res;
}

}  // namespace qlab
