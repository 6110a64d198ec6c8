#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polyreach/polyfit.hpp"
#include "polyreach/rng.hpp"

using namespace polyreach;

namespace {

VolumeCurve curve_of(const std::vector<double>& t, const std::vector<double>& v) {
  VolumeCurve c;
  c.radii = t;
  c.values = v;
  c.provenance = ExactProvenance{"test"};
  return c;
}

// Random interval [a, b] on the 0.001 lattice, inside [0, 2].
Interval random_interval(CounterRng& rng) {
  const auto a = static_cast<int>(rng.uniform(0.0, 1500.0));
  const auto len = 20 + static_cast<int>(rng.uniform(0.0, 480.0));
  return {a * 0.001, (a + len) * 0.001};
}

std::vector<double> nodes_of(const Interval& iv) { return lattice(iv.lo, iv.hi); }

std::vector<double> random_values(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<double> eval_all(const PolyFit& f, const std::vector<double>& t) {
  std::vector<double> out;
  for (double x : t) out.push_back(eval_poly(f, x));
  return out;
}

}  // namespace

TEST(Fit, FrameQuadratic) {
  const auto t = lattice(0.0, 1.0);
  std::vector<double> v;
  for (double x : t) v.push_back(3 + 12 * x + (std::numbers::pi - 4) * x * x);
  const auto fit = l2_project(curve_of(t, v), Interval{0.05, 0.45}, 2);
  EXPECT_NEAR(fit.coefficients[0], 3.0, 1e-6);
  EXPECT_NEAR(fit.coefficients[1], 12.0, 1e-6);
  EXPECT_NEAR(fit.coefficients[2], std::numbers::pi - 4, 1e-6);
  EXPECT_LT(fit.residual, 1e-8);
}

TEST(Fit, RecoversPolynomials) {
  const auto t = lattice(0.0, 2.0);
  const std::vector<double> p = {1.5, -2.0, 0.25, 0.75};
  std::vector<double> v;
  for (double x : t) v.push_back(p[0] + x * (p[1] + x * (p[2] + x * p[3])));
  for (int d : {3, 5, 8}) {
    const auto fit = l2_project(curve_of(t, v), Interval{0.2, 1.9}, d);
    EXPECT_LT(fit.residual, 1e-9) << d;
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(fit.coefficients[i], p[i], 1e-7) << d << " " << i;
  }
}

TEST(Fit, MatchesNormalEquations) {
  CounterRng rng(31);
  const auto t = lattice(0.1, 1.0, 0.01);
  std::vector<double> v;
  for (double x : t) v.push_back(std::sin(3 * x) + 0.1 * rng.normal());
  VolumeCurve c = curve_of(t, v);
  const auto fit = fit_on_nodes(c, t, 2);
  const auto want = oracle::normal_equation_fit(t, v, 2);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(fit.coefficients[i], want[i], 1e-9);
}

TEST(Fit, ResidualOfNonPolynomialPart) {
  // V of the Pacman set is not quadratic past 1; the residual is the
  // trapezoid norm of V minus its fit.
  const auto t = lattice(0.0, 2.0);
  std::vector<double> v;
  for (double x : t) v.push_back(x <= 1 ? 1 + x * x : 2 + 2 * (x - 1) + std::pow(x - 1, 3));
  const Interval iv{0.5, 1.5};
  const auto fit = l2_project(curve_of(t, v), iv, 2);
  const auto nodes = nodes_of(iv);
  std::vector<double> r;
  for (double x : nodes) r.push_back((x <= 1 ? 1 + x * x : 2 + 2 * (x - 1) + std::pow(x - 1, 3)) - eval_poly(fit, x));
  EXPECT_GT(fit.residual, 1e-4);
  EXPECT_NEAR(fit.residual, oracle::trapezoid_l2(nodes, r), 1e-12);
}

TEST(Fit, Errors) {
  const auto t = lattice(0.0, 1.0);
  const std::vector<double> v(t.size(), 1.0);
  const auto c = curve_of(t, v);
  EXPECT_THROW(l2_project(c, Interval{0.5, 0.4}, 2), Error);
  EXPECT_THROW(l2_project(c, Interval{0.5, 1.5}, 2), Error);     // past the curve
  EXPECT_THROW(l2_project(c, Interval{0.1, 0.1005}, 2), Error);  // not a node
  EXPECT_THROW(l2_project(c, Interval{0.1, 0.102}, 5), NumericalFailure);
  try {
    l2_project(c, Interval{0.1, 0.102}, 5);
  } catch (const NumericalFailure& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numerical_failure);
  }
  const auto fit = l2_project(c, Interval{0.0, 0.5}, 2);
  EXPECT_THROW(residual_norm(c, Interval{0.0, 0.6}, fit), Error);
}

TEST(Fit, HighDegreeStaysWellConditioned) {
  const auto t = lattice(0.0, 2.0);
  std::vector<double> v;
  for (double x : t) v.push_back(std::exp(x) + std::sqrt(x));
  double prev = std::numeric_limits<double>::infinity();
  for (int d : {8, 20, 30, 50}) {
    const auto fit = l2_project(curve_of(t, v), Interval{0.5, 2.0}, d);
    EXPECT_TRUE(std::isfinite(fit.residual));
    EXPECT_LE(fit.residual, prev * (1 + 1e-9) + 1e-13);
    prev = fit.residual;
  }
}

// 1000 random instances per property.

TEST(ProjectionProperties, Idempotence) {
  CounterRng rng(101);
  const auto t = lattice(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Interval iv = random_interval(rng);
    const int d = 1 + k % 4;
    const auto base = l2_project(curve_of(t, random_values(rng, t.size())), iv, d);
    // Re-project the fit's own values.
    std::vector<double> v = eval_all(base, t);
    const auto again = l2_project(curve_of(t, v), iv, d);
    for (int i = 0; i <= d; ++i)
      ASSERT_NEAR(again.coefficients[i], base.coefficients[i], 1e-9 * (1 + std::abs(base.coefficients[i])))
          << k;
    ASSERT_LT(again.residual, 1e-9);
  }
}

TEST(ProjectionProperties, Contraction) {
  CounterRng rng(202);
  const auto t = lattice(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Interval iv = random_interval(rng);
    const int d = 1 + k % 6;
    const auto u = random_values(rng, t.size());
    const auto w = random_values(rng, t.size());
    const auto pu = l2_project(curve_of(t, u), iv, d);
    const auto pw = l2_project(curve_of(t, w), iv, d);
    const auto nodes = nodes_of(iv);
    const std::size_t first = find_radius(curve_of(t, u), iv.lo);
    std::vector<double> dp, du;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      dp.push_back(eval_poly(pu, nodes[j]) - eval_poly(pw, nodes[j]));
      du.push_back(u[first + j] - w[first + j]);
    }
    ASSERT_LE(oracle::trapezoid_l2(nodes, dp), oracle::trapezoid_l2(nodes, du) + 1e-9) << k;
  }
}

TEST(ProjectionProperties, DegreeMonotone) {
  CounterRng rng(303);
  const auto t = lattice(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Interval iv = random_interval(rng);
    const auto c = curve_of(t, random_values(rng, t.size()));
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= 10; d += 2) {
      const double r = l2_project(c, iv, d).residual;
      ASSERT_LE(r, prev + 1e-12) << k << " d=" << d;
      prev = r;
    }
  }
}

TEST(ProjectionProperties, NormEquivalence) {
  CounterRng rng(404);
  const auto t = lattice(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Interval iv = random_interval(rng);
    const int d = 1 + k % 3;
    const auto nodes = nodes_of(iv);
    std::vector<double> pa(d + 1), pb(d + 1);
    for (int i = 0; i <= d; ++i) {
      pa[i] = rng.normal();
      pb[i] = rng.normal();
    }
    const auto fa = PolyFit::from_monomial(iv, pa);
    const auto fb = PolyFit::from_monomial(iv, pb);
    std::vector<double> diff;
    for (double x : nodes) diff.push_back(eval_poly(fa, x) - eval_poly(fb, x));
    const double kappa = oracle::gram_kappa(nodes, d);
    ASSERT_LE(coefficient_distance(fa, fb), kappa * oracle::trapezoid_l2(nodes, diff) * (1 + 1e-9)) << k;
  }
}
