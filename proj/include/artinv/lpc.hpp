#pragma once

#include <Eigen/Eigenvalues>
#include <complex>
#include <span>
#include <vector>

#include "artinv/error.hpp"

namespace artinv {

/* Burg's lattice method. Returns the prediction polynomial
   A(z) = 1 + a1 z^-1 + ... + ap z^-p as {1, a1, ..., ap}. */
inline std::vector<double> burg_lpc(std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size());
  if (order < 1) fail(Errc::kBadArgument, "LPC order must be >= 1");
  if (n <= order + 1) fail(Errc::kBadArgument, "signal too short for the LPC order");

  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  std::vector<double> f(x.begin(), x.end());
  std::vector<double> b(x.begin(), x.end());
  std::vector<double> prev(a.size());

  for (int m = 0; m < order; ++m) {
    double num = 0.0, den = 0.0;
    for (int t = m + 1; t < n; ++t) {
      num += f[t] * b[t - 1];
      den += f[t] * f[t] + b[t - 1] * b[t - 1];
    }
    if (den <= 0.0) break;  // degenerate (e.g. all-zero) input; remaining stages stay open
    const double k = -2.0 * num / den;

    prev = a;
    for (int i = 1; i <= m + 1; ++i) a[i] = prev[i] + k * prev[m + 1 - i];

    for (int t = n - 1; t > m; --t) {
      const double ft = f[t];
      f[t] = ft + k * b[t - 1];
      b[t] = b[t - 1] + k * ft;
    }
  }
  return a;
}

// Roots of 1 + a1 z^-1 + ... + ap z^-p, i.e. of the monic polynomial
// z^p + a1 z^(p-1) + ... + ap, via the companion-matrix eigenvalues.
inline std::vector<std::complex<double>> lpc_roots(std::span<const double> a) {
  const int p = static_cast<int>(a.size()) - 1;
  if (p < 1) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) companion(0, i) = -a[static_cast<std::size_t>(i) + 1];
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

}  // namespace artinv
