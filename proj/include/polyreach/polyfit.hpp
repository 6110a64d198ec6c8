#pragma once

// Best discrete-L2 polynomial approximation of a volume curve on an interval.
//
// Fits are solved in shifted-Legendre coordinates with a column-pivoted QR
// and converted to monomial coefficients only for low degrees. The L2 norm
// on [a, b] is the trapezoid rule over the curve nodes in [a, b]; on the
// usual 0.001 lattice this is the step-scaled discrete norm.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/volume.hpp"

namespace polyreach {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool same_as(const Interval& other, double tol = 1e-12) const noexcept {
    return std::abs(lo - other.lo) <= tol && std::abs(hi - other.hi) <= tol;
  }
};

inline constexpr int kMaxFitDegree = 60;
/// Above this degree monomial coefficients are not formed.
inline constexpr int kMaxMonomialDegree = 12;
/// Largest node spacing accepted by l2_project.
inline constexpr double kNormStep = 0.001;

struct PolyFit {
  Interval interval;
  int degree = 0;
  std::vector<double> coefficients;  ///< monomial, constant term first (empty above kMaxMonomialDegree)
  double residual = 0.0;
  std::vector<double> legendre;  ///< coordinates in P_j((2t - a - b) / (b - a)); empty when built from monomials

  static PolyFit from_monomial(Interval interval, std::vector<double> coefficients) {
    if (coefficients.empty()) coefficients.push_back(0.0);
    PolyFit fit;
    fit.interval = interval;
    fit.degree = static_cast<int>(coefficients.size()) - 1;
    fit.coefficients = std::move(coefficients);
    return fit;
  }
};

namespace detail {

inline double to_reference(const Interval& iv, double t) noexcept {
  return (2.0 * t - iv.lo - iv.hi) / (iv.hi - iv.lo);
}

// Clenshaw for sum c_j P_j(x).
inline double legendre_sum(std::span<const double> c, double x) noexcept {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t jj = c.size(); jj-- > 0;) {
    const double j = static_cast<double>(jj);
    // P_{j+1} = ((2j+1) x P_j - j P_{j-1}) / (j+1)
    const double alpha = (2.0 * j + 1.0) / (j + 1.0) * x;
    const double beta = -(j + 1.0) / (j + 2.0);
    const double b0 = c[jj] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

// Monomial coefficients (in t) of sum c_j P_j(alpha t + beta).
inline std::vector<double> legendre_to_monomial(std::span<const double> c, const Interval& iv) {
  const std::size_t n = c.size();
  // powers of x for each P_j
  std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
  P[0][0] = 1.0;
  if (n > 1) P[1][1] = 1.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double jd = static_cast<double>(j);
    for (std::size_t k = 0; k < n; ++k) {
      double v = -jd * P[j - 1][k];
      if (k > 0) v += (2.0 * jd + 1.0) * P[j][k - 1];
      P[j + 1][k] = v / (jd + 1.0);
    }
  }
  std::vector<double> in_x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) in_x[k] += c[j] * P[j][k];

  // substitute x = alpha t + beta
  const double alpha = 2.0 / (iv.hi - iv.lo);
  const double beta = -(iv.hi + iv.lo) / (iv.hi - iv.lo);
  std::vector<double> out(n, 0.0);
  std::vector<double> power{1.0};  // coefficients of (alpha t + beta)^k
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < power.size(); ++i) out[i] += in_x[k] * power[i];
    std::vector<double> next(power.size() + 1, 0.0);
    for (std::size_t i = 0; i < power.size(); ++i) {
      next[i] += beta * power[i];
      next[i + 1] += alpha * power[i];
    }
    power = std::move(next);
  }
  return out;
}

// Trapezoid weights for the (possibly nonuniform) nodes t.
inline std::vector<double> trapezoid_weights(std::span<const double> t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = t[k + 1] - t[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

struct NodeRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

inline NodeRange select_nodes(const VolumeCurve& curve, const Interval& iv) {
  if (!(iv.lo >= 0.0) || !(iv.hi > iv.lo))
    fail(ErrorKind::invalid_input, "interval must satisfy 0 <= a < b");
  const std::size_t first = find_radius(curve, iv.lo);
  const std::size_t last = find_radius(curve, iv.hi);
  if (first == static_cast<std::size_t>(-1) || last == static_cast<std::size_t>(-1))
    fail(ErrorKind::invalid_input, "interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                                       "] endpoints are not curve nodes");
  for (std::size_t k = first; k < last; ++k)
    if (curve.radii[k + 1] - curve.radii[k] > kNormStep + 1e-9)
      fail(ErrorKind::invalid_input, "curve spacing exceeds the 0.001 norm step on the interval");
  return {first, last};
}

inline double weighted_residual(std::span<const double> t, std::span<const double> y,
                                std::span<const double> w, const PolyFit& fit);

}  // namespace detail

/// Horner on monomial coefficients, or Clenshaw on the Legendre coordinates
/// when the fit carries them.
inline double eval_poly(const PolyFit& fit, double t) {
  if (!fit.legendre.empty()) return detail::legendre_sum(fit.legendre, detail::to_reference(fit.interval, t));
  double v = 0.0;
  for (std::size_t i = fit.coefficients.size(); i-- > 0;) v = v * t + fit.coefficients[i];
  return v;
}

namespace detail {

inline double weighted_residual(std::span<const double> t, std::span<const double> y,
                                std::span<const double> w, const PolyFit& fit) {
  double s = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double e = y[k] - eval_poly(fit, t[k]);
    s += w[k] * e * e;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Weighted least squares of degree `degree` over the given nodes. `weights`
/// both define the objective and the reported residual.
inline PolyFit fit_weighted(std::span<const double> t, std::span<const double> y,
                            std::span<const double> weights, Interval interval, int degree) {
  if (degree < 0 || degree > kMaxFitDegree)
    fail(ErrorKind::invalid_input, "degree must lie in 0.." + std::to_string(kMaxFitDegree));
  if (t.size() != y.size() || t.size() != weights.size())
    fail(ErrorKind::invalid_input, "node, value and weight arrays differ in length");
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  const auto rows = static_cast<Eigen::Index>(t.size());
  if (rows < cols)
    throw NumericalFailure("degree " + std::to_string(degree) + " fit on " + std::to_string(t.size()) +
                               " nodes is rank deficient",
                           std::numeric_limits<double>::infinity());

  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double sw = std::sqrt(weights[static_cast<std::size_t>(k)]);
    const double x = detail::to_reference(interval, t[static_cast<std::size_t>(k)]);
    double p_prev = 1.0, p = x;
    A(k, 0) = sw;
    if (cols > 1) A(k, 1) = sw * x;
    for (Eigen::Index j = 1; j + 1 < cols; ++j) {
      const double jd = static_cast<double>(j);
      const double p_next = ((2.0 * jd + 1.0) * x * p - jd * p_prev) / (jd + 1.0);
      p_prev = p;
      p = p_next;
      A(k, j + 1) = sw * p;
    }
    b(k) = sw * y[static_cast<std::size_t>(k)];
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const auto& R = qr.matrixR();
  const double rmax = std::abs(R(0, 0));
  const double rmin = std::abs(R(cols - 1, cols - 1));
  const double condition = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  if (qr.rank() < cols)
    throw NumericalFailure("degree " + std::to_string(degree) + " fit on [" + std::to_string(interval.lo) +
                               ", " + std::to_string(interval.hi) + "] lost rank",
                           condition);
  const Eigen::VectorXd c = qr.solve(b);

  PolyFit fit;
  fit.interval = interval;
  fit.degree = degree;
  fit.legendre.assign(c.data(), c.data() + c.size());
  if (degree <= kMaxMonomialDegree) fit.coefficients = detail::legendre_to_monomial(fit.legendre, interval);
  fit.residual = detail::weighted_residual(t, y, weights, fit);
  return fit;
}

/// Best L2([a, b]) approximation of the curve by a polynomial of degree <= degree.
inline PolyFit l2_project(const VolumeCurve& curve, Interval interval, int degree) {
  const auto range = detail::select_nodes(curve, interval);
  const auto n = range.last - range.first + 1;
  const std::span<const double> t(curve.radii.data() + range.first, n);
  const std::span<const double> y(curve.values.data() + range.first, n);
  const std::vector<double> w = detail::trapezoid_weights(t);
  return fit_weighted(t, y, w, interval, degree);
}

/// ||curve - fit|| in L2([a, b]) with the same quadrature as l2_project.
inline double residual_norm(const VolumeCurve& curve, Interval interval, const PolyFit& fit) {
  if (!fit.interval.same_as(interval))
    fail(ErrorKind::invalid_input, "fit interval differs from the requested interval");
  const auto range = detail::select_nodes(curve, interval);
  const auto n = range.last - range.first + 1;
  const std::span<const double> t(curve.radii.data() + range.first, n);
  const std::span<const double> y(curve.values.data() + range.first, n);
  const std::vector<double> w = detail::trapezoid_weights(t);
  return detail::weighted_residual(t, y, w, fit);
}

/// Ordinary (equal-weight) least squares on selected curve nodes. The
/// reported residual is the trapezoid L2 norm over the same nodes.
inline PolyFit fit_on_nodes(const VolumeCurve& curve, std::span<const double> nodes, int degree) {
  if (nodes.size() < 2) fail(ErrorKind::invalid_input, "need at least two nodes");
  std::vector<double> t, y;
  t.reserve(nodes.size());
  y.reserve(nodes.size());
  for (double r : nodes) {
    const std::size_t k = find_radius(curve, r);
    if (k == static_cast<std::size_t>(-1))
      fail(ErrorKind::invalid_input, "node " + std::to_string(r) + " is not on the curve");
    t.push_back(curve.radii[k]);
    y.push_back(curve.values[k]);
  }
  const Interval iv{t.front(), t.back()};
  const std::vector<double> ones(t.size(), 1.0);
  PolyFit fit = fit_weighted(t, y, ones, iv, degree);
  fit.residual = detail::weighted_residual(t, y, detail::trapezoid_weights(t), fit);
  return fit;
}

/// Chebyshev distance between monomial coefficient vectors.
inline double coefficient_distance(const PolyFit& f, const PolyFit& g) {
  if (f.degree != g.degree) fail(ErrorKind::invalid_input, "fits differ in degree");
  if (!f.interval.same_as(g.interval)) fail(ErrorKind::invalid_input, "fits differ in interval");
  if (f.coefficients.size() != g.coefficients.size() || f.coefficients.empty())
    fail(ErrorKind::invalid_input, "monomial coefficients unavailable");
  double d = 0.0;
  for (std::size_t i = 0; i < f.coefficients.size(); ++i)
    d = std::max(d, std::abs(f.coefficients[i] - g.coefficients[i]));
  return d;
}

}  // namespace polyreach
