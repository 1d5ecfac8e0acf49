#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "artinv/error.hpp"

namespace artinv {

struct NelderMeadConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double cost_spread_tol = 1e-3;     // converged when f_worst - f_best drops below
  double simplex_spread_tol = 1e-7;  // or when the simplex collapses geometrically
  int max_iterations = 500;
  double initial_edge = 0.5;

  void validate() const {
    if (!(reflection > 0.0) || !(expansion > 1.0) || !(contraction > 0.0 && contraction < 1.0) ||
        !(shrink > 0.0 && shrink < 1.0))
      fail(Errc::kBadConfig, "nelder-mead coefficients out of range");
    if (max_iterations < 1) fail(Errc::kBadConfig, "max_iterations must be >= 1");
    if (!(initial_edge > 0.0)) fail(Errc::kBadConfig, "initial simplex edge must be positive");
  }
};

struct NelderMeadResult {
  std::vector<double> x;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

/* Downhill simplex minimization. One iteration is one reflect / expand /
   contract / shrink step; the simplex starts at x0 with one vertex displaced
   by initial_edge along each axis. */
template <typename CostFn>
NelderMeadResult nelder_mead(CostFn&& cost, std::span<const double> x0,
                             const NelderMeadConfig& cfg) {
  cfg.validate();
  const std::size_t dim = x0.size();
  if (dim == 0) fail(Errc::kBadArgument, "nelder-mead needs at least one dimension");

  std::vector<std::vector<double>> v(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) v[i + 1][i] += cfg.initial_edge;
  std::vector<double> f(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) f[i] = cost(std::span<const double>(v[i]));
  if (!std::isfinite(f[0]))
    fail(Errc::kBadArgument, "cost is not finite at the start point");

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), xr(dim), xx(dim);
  NelderMeadResult out;

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[dim];
    const std::size_t second_worst = order[dim - 1];

    const double spread = f[worst] - f[best];
    double geom = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t d = 0; d < dim; ++d)
        geom = std::max(geom, std::abs(v[i][d] - v[best][d]));
    if (spread < cfg.cost_spread_tol || geom < cfg.simplex_spread_tol) {
      out.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += v[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t d = 0; d < dim; ++d)
      xr[d] = centroid[d] + cfg.reflection * (centroid[d] - v[worst][d]);
    const double fr = cost(std::span<const double>(xr));

    if (fr < f[best]) {
      for (std::size_t d = 0; d < dim; ++d)
        xx[d] = centroid[d] + cfg.expansion * (xr[d] - centroid[d]);
      const double fe = cost(std::span<const double>(xx));
      if (fe < fr) {
        v[worst] = xx;
        f[worst] = fe;
      } else {
        v[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[second_worst]) {
      v[worst] = xr;
      f[worst] = fr;
    } else {
      bool shrink_needed = false;
      if (fr < f[worst]) {
        // outside contraction
        for (std::size_t d = 0; d < dim; ++d)
          xx[d] = centroid[d] + cfg.contraction * (xr[d] - centroid[d]);
        const double fc = cost(std::span<const double>(xx));
        if (fc <= fr) {
          v[worst] = xx;
          f[worst] = fc;
        } else {
          shrink_needed = true;
        }
      } else {
        // inside contraction
        for (std::size_t d = 0; d < dim; ++d)
          xx[d] = centroid[d] - cfg.contraction * (centroid[d] - v[worst][d]);
        const double fc = cost(std::span<const double>(xx));
        if (fc < f[worst]) {
          v[worst] = xx;
          f[worst] = fc;
        } else {
          shrink_needed = true;
        }
      }
      if (shrink_needed) {
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < dim; ++d)
            v[i][d] = v[best][d] + cfg.shrink * (v[i][d] - v[best][d]);
          f[i] = cost(std::span<const double>(v[i]));
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (f[i] < f[best]) best = i;
  out.x = v[best];
  out.cost = f[best];
  out.iterations = iter;
  return out;
}

}  // namespace artinv
