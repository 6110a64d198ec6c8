#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/region.hpp"
#include "polyreach/rng.hpp"

namespace polyreach {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct PointCloud {
  std::vector<Point<D>> points;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  AxisBox bounding_box() const {
    if (points.empty()) fail(ErrorKind::invalid_input, "bounding box of an empty cloud");
    AxisBox box{std::vector<double>(D, std::numeric_limits<double>::infinity()),
                std::vector<double>(D, -std::numeric_limits<double>::infinity())};
    for (const auto& p : points)
      for (std::size_t j = 0; j < D; ++j) {
        box.lo[j] = std::min(box.lo[j], p[j]);
        box.hi[j] = std::max(box.hi[j], p[j]);
      }
    return box;
  }
};

/// Rejection sampler: n iid uniform points in S, reproducible from the seed.
template <std::size_t D>
PointCloud<D> sample_uniform(const RegionSpec& region, std::size_t n, std::uint64_t seed) {
  validate(region);
  if (dimension(region) != D)
    fail(ErrorKind::invalid_input, "region dimension " + std::to_string(dimension(region)) +
                                       " does not match cloud dimension " + std::to_string(D));
  if (n == 0) fail(ErrorKind::invalid_input, "sample size must be >= 1");

  const AxisBox box = bounding_box(region);
  if (!(box.measure() > 0.0)) fail(ErrorKind::degenerate_region, "bounding box has zero measure");

  constexpr std::uint64_t kProposalCap = 1'000'000;
  constexpr double kMinAcceptance = 1e-6;

  PointCloud<D> cloud;
  cloud.seed = seed;
  cloud.points.reserve(n);
  CounterRng rng(seed);
  std::uint64_t proposals = 0;
  Point<D> p{};
  while (cloud.points.size() < n) {
    for (std::size_t j = 0; j < D; ++j) p[j] = rng.uniform(box.lo[j], box.hi[j]);
    ++proposals;
    if (contains(region, std::span<const double>(p))) cloud.points.push_back(p);
    if (proposals >= kProposalCap &&
        static_cast<double>(cloud.points.size()) < kMinAcceptance * static_cast<double>(proposals))
      fail(ErrorKind::degenerate_region, "acceptance rate below 1e-6 after " +
                                             std::to_string(proposals) + " proposals");
  }
  return cloud;
}

}  // namespace polyreach
