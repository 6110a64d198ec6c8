#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's fitting or indexing code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

template <std::size_t D>
double brute_nearest(const std::vector<std::array<double, D>>& pts, const std::array<double, D>& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    double s = 0.0;
    for (std::size_t j = 0; j < D; ++j) s += (p[j] - q[j]) * (p[j] - q[j]);
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

/// Trapezoid-weighted sum of f^2 over nodes t.
inline double trapezoid_l2(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) s += 0.5 * (t[k + 1] - t[k]) * (f[k] * f[k] + f[k + 1] * f[k + 1]);
  return std::sqrt(s);
}

/// sqrt of the largest eigenvalue of the inverse Gram matrix of 1, t, ..., t^d
/// under the trapezoid inner product on nodes t: |theta|_2 <= kappa ||p||.
inline double gram_kappa(const std::vector<double>& t, int d) {
  const int m = d + 1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    w[k] += 0.5 * (t[k + 1] - t[k]);
    w[k + 1] += 0.5 * (t[k + 1] - t[k]);
  }
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) G(i, j) += w[k] * std::pow(t[k], i + j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  return std::sqrt(1.0 / es.eigenvalues().minCoeff());
}

/// Pearson chi-square statistic of counts against equal expected counts.
inline double chi_square(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double e = total / static_cast<double>(counts.size());
  double x = 0.0;
  for (auto c : counts) x += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
  return x;
}

/// Naive normal equations for an unweighted polynomial fit, in long double.
inline std::vector<double> normal_equation_fit(const std::vector<double>& t, const std::vector<double>& y, int d) {
  const int m = d + 1;
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> A(m, m);
  Eigen::Matrix<long double, Eigen::Dynamic, 1> b(m);
  A.setZero();
  b.setZero();
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int i = 0; i < m; ++i) {
      b(i) += std::pow(static_cast<long double>(t[k]), i) * y[k];
      for (int j = 0; j < m; ++j) A(i, j) += std::pow(static_cast<long double>(t[k]), i + j);
    }
  const auto x = A.fullPivLu().solve(b).eval();
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = static_cast<double>(x(i));
  return out;
}

}  // namespace oracle
