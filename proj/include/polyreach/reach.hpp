#pragma once

// Polynomial-reach estimators and coefficient estimation.
//
// reach_lower_bound is the residual-ratio break detector: a degree-d fit on
// I_i = [a, r_i] against a degree-ell fit on J_i = [r_i, r_K], reporting the
// last grid radius before the first ratio above 1. The step-0 test fits on
// [0, r_1]; later numerators start at a = numerator_floor. reach_consistent scans
// G_n(t) = ||V_n - P_n^t||_{L2[0,t]} for its first crossing of epsilon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/polyfit.hpp"
#include "polyreach/volume.hpp"

namespace polyreach {

/// A residual at or below this fraction of ||V||_{L2(I)} is treated as an
/// exact zero when forming ratios.
inline constexpr double kZeroResidualRelative = 1e-10;

struct ReachConfig {
  std::vector<double> grid;  ///< r_1 < ... < r_K
  int degree = 2;            ///< ambient dimension d
  int ell = 8;               ///< denominator degree, ell >= d
  double eta = 0.1;
  std::size_t n = 0;  ///< sample size, for U_n
  /// Left end of the ratio numerators. Near r = 0 the empirical curve rises
  /// from V_n(0) = 0 and that jump alone swamps any ratio.
  double numerator_floor = 0.07;

  void validate() const {
    if (grid.size() < 2) fail(ErrorKind::invalid_config, "reach grid needs at least two radii");
    if (!(grid.front() > 0.0)) fail(ErrorKind::invalid_config, "grid must start above 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) fail(ErrorKind::invalid_config, "grid must increase strictly");
    if (degree < 0) fail(ErrorKind::invalid_config, "degree must be >= 0");
    if (ell < degree) fail(ErrorKind::invalid_config, "ell must be >= degree");
    if (ell > kMaxFitDegree) fail(ErrorKind::invalid_config, "ell too large");
    if (!(eta > 0.0)) fail(ErrorKind::invalid_config, "eta must be > 0");
    if (degree > 0 && !(eta < 0.5 / degree))
      fail(ErrorKind::invalid_config, "eta must be < 1/(2d) so that U_n decays");
    if (n < 2) fail(ErrorKind::invalid_config, "sample size must be >= 2");
    if (!(numerator_floor >= 0.0) || !(numerator_floor < grid.back()))
      fail(ErrorKind::invalid_config, "numerator floor must lie in [0, r_K)");
  }
};

/// U_n = (log n / n)^(1/(2d) - eta).
inline double threshold_u(std::size_t n, int degree, double eta) {
  if (n < 2) fail(ErrorKind::invalid_config, "U_n needs n >= 2");
  if (degree < 1) fail(ErrorKind::invalid_config, "U_n needs degree >= 1");
  const double exponent = 1.0 / (2.0 * degree) - eta;
  if (!(eta > 0.0) || !(exponent > 0.0))
    fail(ErrorKind::invalid_config, "need 0 < eta < 1/(2d)");
  const double nd = static_cast<double>(n);
  return std::pow(std::log(nd) / nd, exponent);
}

struct ReachEstimate {
  double r_hat = 0.0;
  bool stopped_at_step0 = false;
  double step0_residual = 0.0;
  double threshold = 0.0;  ///< U_n
  /// 1-based index of the first ratio above 1; 0 if none (or step-0 stop).
  std::size_t break_index = 0;
  std::vector<double> ratios;        ///< c_1 .. up to the break
  std::vector<double> numerators;    ///< ||V_n - P_{n,d}^{I_i}||
  std::vector<double> denominators;  ///< ||V_n - P_{n,ell}^{J_i}||
};

namespace detail {

inline double curve_l2(const VolumeCurve& curve, const Interval& iv) {
  const auto range = select_nodes(curve, iv);
  const auto n = range.last - range.first + 1;
  const std::span<const double> t(curve.radii.data() + range.first, n);
  const auto w = trapezoid_weights(t);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * curve.values[range.first + k] * curve.values[range.first + k];
  return std::sqrt(s);
}

inline double residual_or_zero(double residual, double scale) {
  return residual <= kZeroResidualRelative * scale ? 0.0 : residual;
}

inline double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

inline PolyFit fit_in_context(const VolumeCurve& curve, Interval iv, int degree, const char* what) {
  try {
    return l2_project(curve, iv, degree);
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(std::string(what) + ": " + e.what(), e.condition());
  }
}

}  // namespace detail

inline ReachEstimate reach_lower_bound(const VolumeCurve& curve, const ReachConfig& cfg) {
  cfg.validate();
  const auto& r = cfg.grid;
  const double r_last = r.back();

  ReachEstimate est;
  est.threshold = threshold_u(cfg.n, cfg.degree, cfg.eta);

  auto numerator = [&](double a, double b) {
    if (b <= a + cfg.degree * kNormStep + 1e-12) return 0.0;  // too short to misfit
    const Interval iv{a, b};
    const PolyFit fit = detail::fit_in_context(curve, iv, cfg.degree, "numerator fit");
    return detail::residual_or_zero(fit.residual, detail::curve_l2(curve, iv));
  };

  // Step 0
  const double first = numerator(0.0, r[0]);
  est.step0_residual = first;
  if (first > est.threshold) {
    est.stopped_at_step0 = true;
    est.r_hat = 0.0;
    return est;
  }

  // Step 1: c_i for i = 1 .. K-1, stopping at the first c_i > 1.
  const std::size_t K = r.size();
  for (std::size_t i = 1; i < K; ++i) {
    const double num = numerator(cfg.numerator_floor, r[i - 1]);
    const Interval tail{r[i - 1], r_last};
    const PolyFit den_fit = detail::fit_in_context(curve, tail, cfg.ell, "denominator fit");
    const double den = detail::residual_or_zero(den_fit.residual, detail::curve_l2(curve, tail));
    const double c = detail::ratio(num, den);
    est.numerators.push_back(num);
    est.denominators.push_back(den);
    est.ratios.push_back(c);
    if (c > 1.0) {
      est.break_index = i;
      est.r_hat = i >= 2 ? r[i - 2] : 0.0;  // r_{i-1}, with r_0 = 0
      return est;
    }
  }
  est.r_hat = r[K - 2];
  return est;
}

struct ConsistentConfig {
  int degree = 2;
  double epsilon = 1e-3;
  double t_min = 0.1;
  double t_max = 1.98;
  double step = 0.01;
};

struct ConsistentReach {
  double radius = 0.0;
  bool exceeded = false;  ///< false when G_n stayed <= epsilon over the whole scan
};

/// c * (log n / n)^(1/(2d) - eta), a default epsilon family for reach_consistent.
inline double default_epsilon(std::size_t n, int degree, double eta, double scale = 1.0) {
  return scale * threshold_u(n, degree, eta);
}

/// G_n(t) on [0, t].
inline double approximation_error(const VolumeCurve& curve, double t, int degree) {
  return l2_project(curve, Interval{0.0, t}, degree).residual;
}

/// Smallest scanned t with G_n(t) > epsilon.
inline ConsistentReach reach_consistent(const VolumeCurve& curve, const ConsistentConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) fail(ErrorKind::invalid_config, "epsilon must be > 0");
  if (!(cfg.step > 0.0) || !(cfg.t_max >= cfg.t_min) || !(cfg.t_min > 0.0))
    fail(ErrorKind::invalid_config, "scan needs 0 < t_min <= t_max and step > 0");
  const double steps = (cfg.t_max - cfg.t_min) / cfg.step;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    fail(ErrorKind::invalid_config, "scan step must divide the scan range");
  const auto count = static_cast<std::int64_t>(std::llround(steps));
  for (std::int64_t k = 0; k <= count; ++k) {
    const double t = std::round((cfg.t_min + static_cast<double>(k) * cfg.step) / kNormStep) * kNormStep;
    if (approximation_error(curve, t, cfg.degree) > cfg.epsilon) return {t, true};
  }
  return {cfg.t_max, false};
}

enum class SkipReason {
  none,
  step0_stop,      ///< R-hat = 0
  at_first_radius, ///< R-hat = r_1
  too_short,       ///< fewer than three nodes in [0.1, R-hat]
};

inline const char* to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::none: return "none";
    case SkipReason::step0_stop: return "step0_stop";
    case SkipReason::at_first_radius: return "at_first_radius";
    case SkipReason::too_short: return "too_short";
  }
  return "unknown";
}

inline SkipReason skip_reason_from_string(const std::string& s) {
  if (s == "none") return SkipReason::none;
  if (s == "step0_stop") return SkipReason::step0_stop;
  if (s == "at_first_radius") return SkipReason::at_first_radius;
  if (s == "too_short") return SkipReason::too_short;
  fail(ErrorKind::invalid_input, "unknown skip reason '" + s + "'");
}

struct CoefficientEstimate {
  std::optional<PolyFit> fit;
  SkipReason reason = SkipReason::none;

  bool skipped() const noexcept { return !fit.has_value(); }
};

inline constexpr double kCoefficientStart = 0.1;
inline constexpr double kCoefficientStep = 0.01;

/// Degree-d least squares of the curve on {0.1, 0.11, ..., R-hat}. Runs with
/// R-hat = 0 or R-hat = r_1 are skipped.
inline CoefficientEstimate estimate_coefficients(const VolumeCurve& curve, double r_hat, const ReachConfig& cfg) {
  CoefficientEstimate out;
  if (r_hat <= 0.0) {
    out.reason = SkipReason::step0_stop;
    return out;
  }
  if (!cfg.grid.empty() && r_hat <= cfg.grid.front() + 1e-12) {
    out.reason = SkipReason::at_first_radius;
    return out;
  }
  const auto k0 = static_cast<std::int64_t>(std::llround(kCoefficientStart / kCoefficientStep));
  const auto k1 = static_cast<std::int64_t>(std::floor(r_hat / kCoefficientStep + 1e-9));
  if (k1 - k0 + 1 < 3) {
    out.reason = SkipReason::too_short;
    return out;
  }
  std::vector<double> nodes;
  for (std::int64_t k = k0; k <= k1; ++k)
    nodes.push_back(std::round(static_cast<double>(k) * kCoefficientStep / kNormStep) * kNormStep);
  out.fit = fit_on_nodes(curve, nodes, cfg.degree);
  return out;
}

/// Arithmetic grid from `first` with `step`, kept strictly below `last`,
/// then `last` appended. Values are rounded to the 0.001 lattice.
inline std::vector<double> arithmetic_grid(double first, double step, double last) {
  if (!(first > 0.0) || !(step > 0.0) || !(last > first))
    fail(ErrorKind::invalid_config, "grid needs 0 < first < last and step > 0");
  std::vector<double> g;
  for (std::int64_t k = 0;; ++k) {
    const double v = std::round((first + static_cast<double>(k) * step) / kNormStep) * kNormStep;
    if (v >= last - 1e-9) break;
    g.push_back(v);
  }
  g.push_back(std::round(last / kNormStep) * kNormStep);
  return g;
}

enum class GridFamily { standard, frame };

/// Named grids gr1, gr2, gr3. The standard family (Pacman, union of squares)
/// ends at 1.98; the frame family ends at 1.5.
inline std::vector<double> preset_grid(const std::string& name, GridFamily family) {
  if (family == GridFamily::standard) {
    if (name == "gr1") return arithmetic_grid(0.2, 0.4, 1.98);
    if (name == "gr2") return arithmetic_grid(0.3, 0.3, 1.98);
    if (name == "gr3") return arithmetic_grid(0.3, 0.4, 1.98);
  } else {
    if (name == "gr1") return arithmetic_grid(0.1, 0.2, 1.5);
    if (name == "gr2") return arithmetic_grid(0.1, 0.25, 1.5);
    if (name == "gr3") return arithmetic_grid(0.2, 0.3, 1.5);
  }
  fail(ErrorKind::invalid_config, "unknown grid '" + name + "'");
}

}  // namespace polyreach
