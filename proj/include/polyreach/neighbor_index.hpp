#pragma once

// Exact nearest-neighbour distances to a point cloud through a uniform grid
// of buckets with expanding ring search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/point_cloud.hpp"
#include "polyreach/region.hpp"
#include "polyreach/rng.hpp"

namespace polyreach {

template <std::size_t D>
struct Neighbor {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t id = 0;
};

/// Mean inter-point spacing (measure(bbox) / n)^(1/D) of the cloud.
template <std::size_t D>
double default_cell_size(const PointCloud<D>& cloud) {
  const AxisBox box = cloud.bounding_box();
  const double n = static_cast<double>(cloud.size());
  double h = std::pow(box.measure() / n, 1.0 / static_cast<double>(D));
  if (!(h > 0.0)) {
    // Flat or single-point cloud.
    double extent = 0.0;
    for (std::size_t j = 0; j < D; ++j) extent = std::max(extent, box.hi[j] - box.lo[j]);
    h = extent > 0.0 ? extent / std::pow(n, 1.0 / static_cast<double>(D)) : 1.0;
  }
  return h;
}

/// Immutable after construction; concurrent queries are safe.
template <std::size_t D>
class NeighborIndex {
 public:
  NeighborIndex(const PointCloud<D>& cloud, double cell_size) {
    if (cloud.empty()) fail(ErrorKind::invalid_input, "cannot index an empty cloud");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
      fail(ErrorKind::invalid_input, "cell size must be finite and > 0");
    box_ = cloud.bounding_box();

    // Keep the dense grid within a few cells per point.
    const double cap = std::max(64.0, 4.0 * static_cast<double>(cloud.size()));
    double h = cell_size;
    for (;;) {
      double cells = 1.0;
      for (std::size_t j = 0; j < D; ++j) cells *= std::floor((box_.hi[j] - box_.lo[j]) / h) + 1.0;
      if (cells <= cap) break;
      h *= std::pow(cells / cap, 1.0 / static_cast<double>(D)) * 1.0001;
    }
    h_ = h;
    inv_h_ = 1.0 / h;

    std::int64_t total = 1;
    for (std::size_t j = D; j-- > 0;) {
      origin_[j] = box_.lo[j];
      counts_[j] = static_cast<std::int64_t>(std::floor((box_.hi[j] - box_.lo[j]) * inv_h_)) + 1;
      strides_[j] = total;
      total *= counts_[j];
    }

    // Counting sort of points by cell (CSR layout).
    std::vector<std::uint32_t> cell_of(cloud.size());
    cell_start_.assign(static_cast<std::size_t>(total) + 1, 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::int64_t lin = 0;
      for (std::size_t j = 0; j < D; ++j) lin += cell_coord(cloud.points[i][j], j) * strides_[j];
      cell_of[i] = static_cast<std::uint32_t>(lin);
      ++cell_start_[static_cast<std::size_t>(lin) + 1];
    }
    for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
    std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    sorted_.resize(cloud.size());
    ids_.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const std::uint32_t slot = fill[cell_of[i]]++;
      sorted_[slot] = cloud.points[i];
      ids_[slot] = static_cast<std::uint32_t>(i);
    }
  }

  std::size_t size() const noexcept { return sorted_.size(); }
  double cell_size() const noexcept { return h_; }
  const AxisBox& cloud_box() const noexcept { return box_; }

  double distance(const Point<D>& q) const { return nearest(q).distance; }

  /// Nearest point within `cap` of q; distance is +inf when there is none.
  Neighbor<D> nearest(const Point<D>& q, double cap = std::numeric_limits<double>::infinity()) const {
    std::array<std::int64_t, D> center{};
    double outside2 = 0.0;
    std::array<double, D> outside{};
    for (std::size_t j = 0; j < D; ++j) {
      center[j] = cell_coord(q[j], j);
      const double lo = origin_[j];
      const double hi = origin_[j] + static_cast<double>(counts_[j]) * h_;
      outside[j] = std::max({0.0, lo - q[j], q[j] - hi});
      outside2 += outside[j] * outside[j];
    }

    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    const double cap2 = cap * cap;
    if (outside2 > cap2) return {};
    double best2 = cap2;
    std::uint32_t best_slot = kNone;
    std::array<std::int64_t, D> lo{}, hi{};

    for (std::int64_t k = 0;; ++k) {
      bool covered = true;
      for (std::size_t j = 0; j < D; ++j) {
        lo[j] = std::max<std::int64_t>(0, center[j] - k);
        hi[j] = std::min<std::int64_t>(counts_[j] - 1, center[j] + k);
        covered = covered && lo[j] == 0 && hi[j] == counts_[j] - 1;
      }
      visit_ring(q, center, k, lo, hi, best2, best_slot);
      if (covered) break;

      // Unvisited cells lie in slabs beyond the visited box; bound their distance.
      double bound2 = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < D; ++j) {
        const double base = outside2 - outside[j] * outside[j];
        if (lo[j] > 0) {
          const double g = std::max(0.0, q[j] - (origin_[j] + static_cast<double>(lo[j]) * h_));
          bound2 = std::min(bound2, base + g * g);
        }
        if (hi[j] < counts_[j] - 1) {
          const double g = std::max(0.0, origin_[j] + static_cast<double>(hi[j] + 1) * h_ - q[j]);
          bound2 = std::min(bound2, base + g * g);
        }
      }
      if (best2 <= bound2 * (1.0 - 1e-12)) break;
      // Far from the data the rings grow faster than the ball that can still
      // hold a closer point, so finish by scanning that ball directly.
      if (best_slot != kNone && outside2 > 0.0) {
        scan_ball(q, best2, best_slot);
        break;
      }
    }
    if (best_slot == kNone) return {};
    return {std::sqrt(best2), ids_[best_slot]};
  }

 private:
  std::int64_t cell_coord(double x, std::size_t j) const noexcept {
    const double f = std::floor((x - origin_[j]) * inv_h_);
    if (!(f > 0.0)) return 0;
    return std::min<std::int64_t>(counts_[j] - 1, static_cast<std::int64_t>(f));
  }

  // Squared distance from q to the box spanned by cells [a, b] on the last
  // axis with fixed leading coordinates.
  double run_distance2(const Point<D>& q, const std::array<std::int64_t, D>& cell, std::int64_t a,
                       std::int64_t b) const noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const std::int64_t c0 = j + 1 == D ? a : cell[j];
      const std::int64_t c1 = j + 1 == D ? b : cell[j];
      const double lo = origin_[j] + static_cast<double>(c0) * h_;
      const double hi = origin_[j] + static_cast<double>(c1 + 1) * h_;
      const double g = std::max({0.0, lo - q[j], q[j] - hi});
      s += g * g;
    }
    return s;
  }

  void scan_run(const Point<D>& q, const std::array<std::int64_t, D>& cell, std::int64_t a,
                std::int64_t b, double& best2, std::uint32_t& best_slot) const noexcept {
    if (run_distance2(q, cell, a, b) >= best2) return;
    std::int64_t base = 0;
    for (std::size_t j = 0; j + 1 < D; ++j) base += cell[j] * strides_[j];
    const std::uint32_t first = cell_start_[static_cast<std::size_t>(base + a)];
    const std::uint32_t last = cell_start_[static_cast<std::size_t>(base + b + 1)];
    for (std::uint32_t s = first; s < last; ++s) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < D; ++j) {
        const double dx = sorted_[s][j] - q[j];
        d2 += dx * dx;
      }
      if (d2 < best2) {
        best2 = d2;
        best_slot = s;
      }
    }
  }

  // Scans every cell meeting the ball of squared radius best2 around q, one
  // last-axis run per leading-axis cell, shrinking the ball as it goes.
  void scan_ball(const Point<D>& q, double& best2, std::uint32_t& best_slot) const noexcept {
    constexpr std::size_t last = D - 1;
    const double r = std::sqrt(best2);
    std::array<std::int64_t, D> lo{}, hi{};
    for (std::size_t j = 0; j < D; ++j) {
      lo[j] = cell_coord(q[j] - r, j);
      hi[j] = cell_coord(q[j] + r, j);
    }
    std::array<std::int64_t, D> cell = lo;
    for (;;) {
      double lead2 = 0.0;
      for (std::size_t j = 0; j < last; ++j) {
        const double clo = origin_[j] + static_cast<double>(cell[j]) * h_;
        const double g = std::max({0.0, clo - q[j], q[j] - (clo + h_)});
        lead2 += g * g;
      }
      const double rem2 = best2 - lead2;
      if (rem2 > 0.0) {
        const double rem = std::sqrt(rem2);
        const std::int64_t a = std::max(lo[last], cell_coord(q[last] - rem, last));
        const std::int64_t b = std::min(hi[last], cell_coord(q[last] + rem, last));
        if (a <= b) scan_run(q, cell, a, b, best2, best_slot);
      }
      std::size_t j = last;
      while (j-- > 0) {
        if (++cell[j] <= hi[j]) break;
        cell[j] = lo[j];
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }

  // Visits every cell at Chebyshev distance exactly k from `center`, clipped
  // to [lo, hi]. Leading axes are walked with an odometer; along the last
  // axis either the whole clipped run (when a leading axis sits on the ring)
  // or just its two end cells are scanned.
  void visit_ring(const Point<D>& q, const std::array<std::int64_t, D>& center, std::int64_t k,
                  const std::array<std::int64_t, D>& lo, const std::array<std::int64_t, D>& hi,
                  double& best2, std::uint32_t& best_slot) const noexcept {
    constexpr std::size_t last = D - 1;
    std::array<std::int64_t, D> cell = lo;
    for (;;) {
      bool on_ring = false;
      for (std::size_t j = 0; j < last; ++j)
        on_ring = on_ring || cell[j] == center[j] - k || cell[j] == center[j] + k;
      if (on_ring || k == 0) {
        scan_run(q, cell, lo[last], hi[last], best2, best_slot);
      } else {
        const std::int64_t a = center[last] - k;
        const std::int64_t b = center[last] + k;
        if (a >= lo[last]) scan_run(q, cell, a, a, best2, best_slot);
        if (b <= hi[last]) scan_run(q, cell, b, b, best2, best_slot);
      }
      // advance odometer over leading axes
      std::size_t j = last;
      while (j-- > 0) {
        if (++cell[j] <= hi[j]) break;
        cell[j] = lo[j];
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }

  double h_ = 1.0;
  double inv_h_ = 1.0;
  std::array<double, D> origin_{};
  std::array<std::int64_t, D> counts_{};
  std::array<std::int64_t, D> strides_{};
  std::vector<std::uint32_t> cell_start_;
  std::vector<Point<D>> sorted_;
  std::vector<std::uint32_t> ids_;
  AxisBox box_;
};

template <std::size_t D>
NeighborIndex<D> build_index(const PointCloud<D>& cloud, double cell_size) {
  return NeighborIndex<D>(cloud, cell_size);
}

/// Cells of twice the mean spacing: most probes sit well outside the cloud,
/// where fewer, fuller cells are cheaper to scan.
inline constexpr double kDefaultCellFactor = 2.0;

template <std::size_t D>
NeighborIndex<D> build_index(const PointCloud<D>& cloud) {
  if (cloud.empty()) fail(ErrorKind::invalid_input, "cannot index an empty cloud");
  return NeighborIndex<D>(cloud, kDefaultCellFactor * default_cell_size(cloud));
}

template <std::size_t D>
double distance_to_cloud(const NeighborIndex<D>& index, const Point<D>& q) {
  return index.distance(q);
}

/// Diagnostic approximation of max_{p in boundary} d(p, cloud) from random
/// boundary probes. Every benchmark region has a boundary sampler.
template <std::size_t D>
double boundary_gap(const NeighborIndex<D>& index, const RegionSpec& region, std::size_t probes,
                    std::uint64_t seed) {
  validate(region);
  if (dimension(region) != D) fail(ErrorKind::invalid_input, "region/cloud dimension mismatch");
  if (probes == 0) fail(ErrorKind::invalid_input, "need at least one boundary probe");
  CounterRng rng(seed);
  double gap = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const std::vector<double> b = sample_boundary_point(region, rng);
    Point<D> p{};
    std::copy(b.begin(), b.end(), p.begin());
    gap = std::max(gap, index.distance(p));
  }
  return gap;
}

}  // namespace polyreach
