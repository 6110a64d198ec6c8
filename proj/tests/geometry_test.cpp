#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polyreach/neighbor_index.hpp"
#include "polyreach/point_cloud.hpp"
#include "polyreach/region.hpp"

using namespace polyreach;

namespace {

const double kRadii[] = {0.0, 0.03, 0.25, 0.5, 0.75, 1.0, 1.2, 1.5, 1.98};

// Areas of buffered polygons (tests/oracles/derive_oracles.py).
struct Reference {
  RegionSpec region;
  double v[9];
};

const Reference kReference[] = {
    {Pacman{},
     {2.3561944324, 2.5602003874, 4.2172285470, 6.4441365017, 9.0369182965, 11.9955739314, 14.6279173488,
      19.0332612429, 27.2424517850}},
    {UnionOfSquares{0.5},
     {8.0, 8.4856548666, 12.3926990721, 17.5707962883, 22.1471064118, 27.0548155059, 31.2525177336, 38.0120629148,
      49.9937999003}},
    {UnionOfSquares{1.0},
     {8.0, 8.4856548666, 12.3926990721, 17.5707962883, 23.5342916487, 30.2831851532, 35.0876622129, 42.5884256473,
      55.6453719304}},
    {UnionOfSquares{0.05},
     {8.0, 8.4856548666, 11.4460141729, 15.0852312254, 19.1170346372, 23.5415092095, 27.3638238448, 33.5685277288,
      44.6722574408}},
    {Frame{},
     {3.0, 3.3592274333, 5.9463495360, 8.7853981441, 11.7671458243, 15.1415925766, 18.1238933103, 23.0685832973,
      32.1562995372}},
};

}  // namespace

TEST(ExactVolume, MatchesBufferedPolygons) {
  for (const auto& ref : kReference)
    for (int k = 0; k < 9; ++k)
      EXPECT_NEAR(exact_volume(ref.region, kRadii[k]), ref.v[k], 2e-7 * ref.v[k])
          << region_name(ref.region) << " r=" << kRadii[k];
}

TEST(ExactVolume, PolynomialBelowReach) {
  const double pi = std::numbers::pi;
  for (double t : {0.1, 0.37, 0.99, 1.0})
    EXPECT_NEAR(exact_volume(Pacman{}, t), 3 * pi / 4 + (1.5 * pi + 2) * t + (5 * pi / 4 - 1) * t * t, 1e-12);
  for (double t : {0.1, 0.3, 0.5}) {
    EXPECT_NEAR(exact_volume(UnionOfSquares{0.5}, t), 8 + 16 * t + 2 * pi * t * t, 1e-12);
    EXPECT_NEAR(exact_volume(Frame{}, t), 3 + 12 * t + (pi - 4) * t * t, 1e-12);
  }
}

TEST(ExactVolume, DiskAndBoxSteiner) {
  EXPECT_NEAR(exact_volume(Disk{1.0, 2}, 0.5), std::numbers::pi * 2.25, 1e-12);
  EXPECT_NEAR(exact_volume(Disk{2.0, 3}, 0.0), 4.0 / 3.0 * std::numbers::pi * 8.0, 1e-12);
  EXPECT_NEAR(exact_volume(Disk{1.0, 1}, 0.5), 3.0, 1e-12);
  // Unit square: 1 + 4t + pi t^2.
  EXPECT_NEAR(exact_volume(Box{{0, 0}, {1, 1}}, 0.3), 1 + 1.2 + std::numbers::pi * 0.09, 1e-12);
}

TEST(ExactVolume, SlopeAtZeroIsBoundaryLength) {
  for (const auto& ref : kReference) {
    const double h = 1e-7;
    const double slope = (exact_volume(ref.region, h) - exact_volume(ref.region, 0.0)) / h;
    EXPECT_NEAR(slope, boundary_length(ref.region), 1e-5) << region_name(ref.region);
  }
}

TEST(Region, TrueReach) {
  EXPECT_DOUBLE_EQ(polynomial_reach(Pacman{}), 1.0);
  EXPECT_DOUBLE_EQ(polynomial_reach(UnionOfSquares{0.05}), 0.05);
  EXPECT_DOUBLE_EQ(polynomial_reach(Frame{}), 0.5);
  EXPECT_TRUE(std::isinf(polynomial_reach(Disk{})));
}

TEST(Region, Containment) {
  const double in[] = {-0.5, 0.5}, notch[] = {0.5, 0.5}, out[] = {-0.8, -0.8};
  EXPECT_TRUE(contains(Pacman{}, in));
  EXPECT_FALSE(contains(Pacman{}, notch));
  EXPECT_FALSE(contains(Pacman{}, out));
  const double hole[] = {0.1, 0.1}, rim[] = {0.9, 0.1};
  EXPECT_FALSE(contains(Frame{}, hole));
  EXPECT_TRUE(contains(Frame{}, rim));
  const double gap[] = {1.05, 0.0}, right[] = {2.5, 0.0};
  EXPECT_FALSE(contains(UnionOfSquares{0.5}, gap));
  EXPECT_TRUE(contains(UnionOfSquares{0.5}, right));
  const double three[] = {0, 0, 0};
  EXPECT_THROW(contains(Pacman{}, three), Error);
}

TEST(Region, Validation) {
  EXPECT_THROW(validate(UnionOfSquares{-0.1}), Error);
  EXPECT_THROW(validate(Frame{1.5}), Error);
  EXPECT_THROW(validate(Disk{0.0, 2}), Error);
  EXPECT_THROW(validate(Box{{0, 0}, {1}}), Error);
  EXPECT_NO_THROW(validate(Box{{0, 0}, {1, 1}}));
}

TEST(Sampling, PointsInsideAndReproducible) {
  const auto a = sample_uniform<2>(Pacman{}, 2000, 11);
  const auto b = sample_uniform<2>(Pacman{}, 2000, 11);
  ASSERT_EQ(a.size(), 2000u);
  EXPECT_EQ(a.points, b.points);
  for (const auto& p : a.points) EXPECT_TRUE(contains(Pacman{}, std::span<const double>(p)));
  EXPECT_NE(sample_uniform<2>(Pacman{}, 10, 12).points, sample_uniform<2>(Pacman{}, 10, 11).points);
}

TEST(Sampling, UniformOnBox) {
  const auto cloud = sample_uniform<2>(Box{{0, 0}, {1, 1}}, 100000, 5);
  std::vector<std::size_t> bins(100, 0);
  for (const auto& p : cloud.points)
    ++bins[std::min(9, static_cast<int>(p[0] * 10)) * 10 + std::min(9, static_cast<int>(p[1] * 10))];
  // 99 degrees of freedom, upper 0.1% point.
  EXPECT_LT(oracle::chi_square(bins), 148.2);
}

TEST(Sampling, Errors) {
  EXPECT_THROW(sample_uniform<3>(Pacman{}, 10, 1), Error);
  EXPECT_THROW(sample_uniform<2>(Pacman{}, 0, 1), Error);
  try {
    sample_uniform<2>(Box{{0, 0}, {1, 0}}, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_region);
  }
}

template <std::size_t D>
void check_against_brute_force(const RegionSpec& region, std::size_t n, double cell_factor) {
  const auto cloud = sample_uniform<D>(region, n, 21);
  const NeighborIndex<D> index(cloud, cell_factor * default_cell_size(cloud));
  CounterRng rng(4);
  for (int i = 0; i < 3000; ++i) {
    Point<D> q{};
    for (std::size_t j = 0; j < D; ++j) q[j] = rng.uniform(-4.0, 4.0);
    const auto nb = index.nearest(q);
    const double want = oracle::brute_nearest(cloud.points, q);
    ASSERT_NEAR(nb.distance, want, 1e-12);
    double s = 0.0;
    for (std::size_t j = 0; j < D; ++j) s += (cloud.points[nb.id][j] - q[j]) * (cloud.points[nb.id][j] - q[j]);
    ASSERT_NEAR(std::sqrt(s), want, 1e-12);
    // Capped queries agree below the cap and report +inf above it.
    const double capped = index.nearest(q, 0.5).distance;
    if (want < 0.5) ASSERT_NEAR(capped, want, 1e-12);
    else ASSERT_TRUE(std::isinf(capped));
  }
}

TEST(NeighborIndex, ExactAgainstBruteForce) {
  for (double f : {0.5, 1.0, 2.0, 5.0}) {
    check_against_brute_force<1>(Disk{1.0, 1}, 300, f);
    check_against_brute_force<2>(Pacman{}, 1500, f);
    check_against_brute_force<2>(Frame{}, 800, f);
    check_against_brute_force<3>(Disk{1.0, 3}, 1000, f);
  }
}

TEST(NeighborIndex, DuplicatesAndSinglePoint) {
  PointCloud<2> cloud;
  cloud.points = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  const auto index = build_index(cloud);
  EXPECT_NEAR(index.distance({1.5, 0.5}), 1.0, 1e-15);
  PointCloud<2> one;
  one.points = {{0.0, 0.0}};
  EXPECT_NEAR(build_index(one).distance({3.0, 4.0}), 5.0, 1e-15);
  EXPECT_THROW(build_index(PointCloud<2>{}), Error);
  EXPECT_THROW(NeighborIndex<2>(one, 0.0), Error);
}

TEST(NeighborIndex, BoundaryGapShrinksWithN) {
  const auto small = build_index(sample_uniform<2>(Pacman{}, 200, 3));
  const auto large = build_index(sample_uniform<2>(Pacman{}, 20000, 3));
  const double g_small = boundary_gap(small, Pacman{}, 2000, 9);
  const double g_large = boundary_gap(large, Pacman{}, 2000, 9);
  EXPECT_GT(g_small, g_large);
  EXPECT_GT(g_large, 0.0);
  EXPECT_LT(g_large, 0.1);
}
