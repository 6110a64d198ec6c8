#pragma once

// Empirical volume function V_n(r) = mu(B(cloud, r)) from one Monte Carlo
// distance transform, and exact volume curves for the benchmark shapes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/neighbor_index.hpp"
#include "polyreach/region.hpp"
#include "polyreach/rng.hpp"

namespace polyreach {

/// Sorted distances from m uniform probes in `box` to the cloud. V_n(r) is
/// mu(box) times the empirical CDF of these distances at r. Distances past
/// the margin are never needed and are stored as +inf.
struct DistanceTransform {
  std::vector<double> distances;
  AxisBox box;
  double box_measure = 0.0;
  double margin = 0.0;  ///< largest r with B(cloud, r) inside the box
  std::uint64_t seed = 0;

  std::size_t probes() const noexcept { return distances.size(); }
};

struct EmpiricalProvenance {
  std::size_t probes = 0;
  double box_measure = 0.0;
  std::uint64_t seed = 0;
  AxisBox box;
};

struct ExactProvenance {
  std::string region;
};

using CurveProvenance = std::variant<EmpiricalProvenance, ExactProvenance>;

struct VolumeCurve {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> std_errors;  ///< Monte Carlo standard errors; empty for exact curves
  CurveProvenance provenance;

  std::size_t size() const noexcept { return radii.size(); }
  bool is_exact() const noexcept { return std::holds_alternative<ExactProvenance>(provenance); }

  /// Throws invalid-input if any curve invariant is broken.
  void validate() const {
    if (radii.size() != values.size())
      fail(ErrorKind::invalid_input, "curve radii and values differ in length");
    if (!std_errors.empty() && std_errors.size() != radii.size())
      fail(ErrorKind::invalid_input, "curve standard errors differ in length");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] >= 0.0) || !std::isfinite(values[i]) || values[i] < 0.0)
        fail(ErrorKind::invalid_input, "curve entries must be finite and >= 0");
      if (i > 0 && !(radii[i] > radii[i - 1]))
        fail(ErrorKind::invalid_input, "curve radii must increase strictly");
      if (i > 0 && values[i] < values[i - 1])
        fail(ErrorKind::invalid_input, "volume curve must be nondecreasing");
    }
    if (const auto* e = std::get_if<EmpiricalProvenance>(&provenance))
      for (double v : values)
        if (v > e->box_measure * (1.0 + 1e-12))
          fail(ErrorKind::invalid_input, "empirical volume exceeds the probe box measure");
  }
};

/// Radii k * step for k = round(a / step) .. round(b / step). Nodes are built
/// from integer multiples so that interval endpoints land on the lattice.
inline std::vector<double> lattice(double a, double b, double step = 0.001) {
  if (!(step > 0.0) || !(b >= a) || a < 0.0) fail(ErrorKind::invalid_input, "bad lattice bounds");
  const auto k0 = static_cast<std::int64_t>(std::llround(a / step));
  const auto k1 = static_cast<std::int64_t>(std::llround(b / step));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k1 - k0 + 1));
  for (std::int64_t k = k0; k <= k1; ++k) out.push_back(static_cast<double>(k) * step);
  return out;
}

/// Probe j has coordinates drawn from counters j*D .. j*D+D-1 of one
/// counter-based stream, so the output does not depend on `workers`.
template <std::size_t D>
DistanceTransform mc_distance_transform(const NeighborIndex<D>& index, const AxisBox& box,
                                        std::size_t m, std::uint64_t seed, unsigned workers = 1) {
  if (m == 0) fail(ErrorKind::invalid_input, "need at least one Monte Carlo probe");
  if (box.dimension() != D) fail(ErrorKind::invalid_input, "probe box dimension mismatch");
  if (!box.encloses(index.cloud_box()))
    fail(ErrorKind::invalid_input, "probe box does not contain the cloud");
  if (!(box.measure() > 0.0)) fail(ErrorKind::invalid_input, "probe box has zero measure");

  DistanceTransform dt;
  dt.box = box;
  dt.box_measure = box.measure();
  dt.margin = box.margin_around(index.cloud_box());
  dt.seed = seed;
  dt.distances.resize(m);

  const CounterRng rng(seed);
  auto work = [&](std::size_t first, std::size_t last) {
    Point<D> y{};
    for (std::size_t i = first; i < last; ++i) {
      for (std::size_t j = 0; j < D; ++j) {
        const double u = CounterRng::to_unit(rng.at(static_cast<std::uint64_t>(i * D + j)));
        y[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * u;
      }
      dt.distances[i] = index.nearest(y, dt.margin).distance;
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1 || m < 4096) {
    work(0, m);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (m + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t first = std::min(m, w * chunk);
      const std::size_t last = std::min(m, first + chunk);
      pool.emplace_back(work, first, last);
    }
    for (auto& t : pool) t.join();
  }
  std::sort(dt.distances.begin(), dt.distances.end());
  return dt;
}

/// V_n at each radius as mu(box) * #{d_j <= r} / m.
inline VolumeCurve empirical_volume_curve(const DistanceTransform& dt, std::span<const double> radii) {
  if (dt.distances.empty()) fail(ErrorKind::invalid_input, "empty distance transform");
  VolumeCurve curve;
  curve.provenance = EmpiricalProvenance{dt.probes(), dt.box_measure, dt.seed, dt.box};
  curve.radii.assign(radii.begin(), radii.end());
  curve.values.reserve(radii.size());
  curve.std_errors.reserve(radii.size());
  const double m = static_cast<double>(dt.probes());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r >= 0.0)) fail(ErrorKind::invalid_input, "radii must be >= 0");
    if (i > 0 && !(r > radii[i - 1])) fail(ErrorKind::invalid_input, "radii must increase strictly");
    if (r > dt.margin + 1e-12)
      fail(ErrorKind::out_of_range, "radius " + std::to_string(r) + " exceeds the probe box margin " +
                                        std::to_string(dt.margin));
    const auto count = static_cast<double>(
        std::upper_bound(dt.distances.begin(), dt.distances.end(), r) - dt.distances.begin());
    const double p = count / m;
    curve.values.push_back(dt.box_measure * p);
    curve.std_errors.push_back(dt.box_measure * std::sqrt(p * (1.0 - p) / m));
  }
  return curve;
}

inline VolumeCurve exact_volume_curve(const RegionSpec& region, std::span<const double> radii) {
  VolumeCurve curve;
  curve.provenance = ExactProvenance{region_name(region)};
  curve.radii.assign(radii.begin(), radii.end());
  curve.values.reserve(radii.size());
  for (double r : radii) curve.values.push_back(exact_volume(region, r));
  curve.validate();
  return curve;
}

/// Index of the curve node equal to r (within 1e-9), or npos.
inline std::size_t find_radius(const VolumeCurve& curve, double r, double tol = 1e-9) {
  const auto it = std::lower_bound(curve.radii.begin(), curve.radii.end(), r - tol);
  if (it == curve.radii.end() || std::abs(*it - r) > tol) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - curve.radii.begin());
}

}  // namespace polyreach
