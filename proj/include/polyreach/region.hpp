#pragma once

// Benchmark compact sets: membership, bounding boxes, boundary samplers and
// exact volume functions V(t) = mu(B(S, t)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/rng.hpp"

namespace polyreach {

/// Axis-aligned box [lo, hi] in any dimension.
struct AxisBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const noexcept { return lo.size(); }

  double measure() const noexcept {
    double m = 1.0;
    for (std::size_t j = 0; j < lo.size(); ++j) m *= std::max(0.0, hi[j] - lo[j]);
    return m;
  }

  double diameter() const noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < lo.size(); ++j) s += (hi[j] - lo[j]) * (hi[j] - lo[j]);
    return std::sqrt(s);
  }

  AxisBox padded(double margin) const {
    AxisBox out = *this;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      out.lo[j] -= margin;
      out.hi[j] += margin;
    }
    return out;
  }

  bool contains(std::span<const double> p) const noexcept {
    if (p.size() != lo.size()) return false;
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (p[j] < lo[j] || p[j] > hi[j]) return false;
    return true;
  }

  /// True when `inner` lies inside this box.
  bool encloses(const AxisBox& inner) const noexcept {
    if (inner.dimension() != dimension()) return false;
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (inner.lo[j] < lo[j] || inner.hi[j] > hi[j]) return false;
    return true;
  }

  /// Smallest distance from `inner`'s faces to this box's faces.
  double margin_around(const AxisBox& inner) const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lo.size(); ++j) {
      m = std::min(m, inner.lo[j] - lo[j]);
      m = std::min(m, hi[j] - inner.hi[j]);
    }
    return m;
  }
};

/// Unit disk with the open first quadrant removed.
struct Pacman {};

/// [-1,1]^2 together with a 2x2 square translated right so that the two are
/// separated by a gap of 2 * half_gap.
struct UnionOfSquares {
  double half_gap = 0.5;
};

/// [-1,1]^2 minus an open centred square of the given side.
struct Frame {
  double side = 1.0;
};

/// Closed Euclidean ball centred at the origin.
struct Disk {
  double radius = 1.0;
  std::size_t dim = 2;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

using RegionSpec = std::variant<Pacman, UnionOfSquares, Frame, Disk, Box>;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double unit_ball_volume(std::size_t d) {
  return std::pow(std::numbers::pi, 0.5 * static_cast<double>(d)) /
         std::tgamma(0.5 * static_cast<double>(d) + 1.0);
}

// Antiderivative of sqrt(t^2 - u^2) in u, valid for |u| <= t.
inline double circle_segment_primitive(double t, double u) {
  const double uc = std::clamp(u, -t, t);
  return 0.5 * (uc * std::sqrt(std::max(0.0, t * t - uc * uc)) + t * t * std::asin(uc / t));
}

inline bool in_square(double x, double y, double cx, double half) {
  return std::abs(x - cx) <= half && std::abs(y) <= half;
}

// Uniform point on the perimeter of the axis-aligned square centred at (cx, 0).
inline std::vector<double> square_perimeter_point(double cx, double half, double s) {
  // s in [0, 8 * half)
  const double side = 2.0 * half;
  const int edge = std::min(3, static_cast<int>(s / side));
  const double u = s - edge * side - half;
  switch (edge) {
    case 0: return {cx + u, -half};
    case 1: return {cx + half, u};
    case 2: return {cx - u, half};
    default: return {cx - half, -u};
  }
}

}  // namespace detail

inline std::string region_name(const RegionSpec& region) {
  return std::visit(detail::overloaded{
                        [](const Pacman&) { return std::string("pacman"); },
                        [](const UnionOfSquares&) { return std::string("union-of-squares"); },
                        [](const Frame&) { return std::string("frame"); },
                        [](const Disk&) { return std::string("disk"); },
                        [](const Box&) { return std::string("box"); },
                    },
                    region);
}

inline std::size_t dimension(const RegionSpec& region) {
  return std::visit(detail::overloaded{
                        [](const Disk& d) { return d.dim; },
                        [](const Box& b) { return b.lo.size(); },
                        [](const auto&) { return std::size_t{2}; },
                    },
                    region);
}

/// Throws invalid-config when shape parameters are out of their domain.
inline void validate(const RegionSpec& region) {
  std::visit(detail::overloaded{
                 [](const Pacman&) {},
                 [](const UnionOfSquares& u) {
                   if (!(u.half_gap >= 0.0) || !std::isfinite(u.half_gap))
                     fail(ErrorKind::invalid_config, "union-of-squares half gap must be >= 0");
                 },
                 [](const Frame& f) {
                   if (!(f.side > 0.0 && f.side <= 1.0))
                     fail(ErrorKind::invalid_config, "frame side must lie in (0, 1]");
                 },
                 [](const Disk& d) {
                   if (!(d.radius > 0.0) || d.dim < 1 || d.dim > 3)
                     fail(ErrorKind::invalid_config, "disk needs radius > 0 and dimension 1..3");
                 },
                 [](const Box& b) {
                   if (b.lo.size() != b.hi.size() || b.lo.empty() || b.lo.size() > 3)
                     fail(ErrorKind::invalid_config, "box corners must share dimension 1..3");
                   for (std::size_t j = 0; j < b.lo.size(); ++j)
                     if (!(b.hi[j] >= b.lo[j]))
                       fail(ErrorKind::invalid_config, "box needs hi >= lo on every axis");
                 },
             },
             region);
}

inline AxisBox bounding_box(const RegionSpec& region) {
  return std::visit(
      detail::overloaded{
          [](const Pacman&) { return AxisBox{{-1.0, -1.0}, {1.0, 1.0}}; },
          [](const UnionOfSquares& u) {
            return AxisBox{{-1.0, -1.0}, {3.0 + 2.0 * u.half_gap, 1.0}};
          },
          [](const Frame&) { return AxisBox{{-1.0, -1.0}, {1.0, 1.0}}; },
          [](const Disk& d) {
            return AxisBox{std::vector<double>(d.dim, -d.radius), std::vector<double>(d.dim, d.radius)};
          },
          [](const Box& b) { return AxisBox{b.lo, b.hi}; },
      },
      region);
}

inline bool contains(const RegionSpec& region, std::span<const double> p) {
  if (p.size() != dimension(region))
    fail(ErrorKind::invalid_input, "point dimension " + std::to_string(p.size()) +
                                       " does not match region dimension " +
                                       std::to_string(dimension(region)));
  return std::visit(
      detail::overloaded{
          [&](const Pacman&) {
            const double x = p[0], y = p[1];
            return x * x + y * y <= 1.0 && !(x > 0.0 && y > 0.0);
          },
          [&](const UnionOfSquares& u) {
            return detail::in_square(p[0], p[1], 0.0, 1.0) ||
                   detail::in_square(p[0], p[1], 2.0 + 2.0 * u.half_gap, 1.0);
          },
          [&](const Frame& f) {
            const double h = 0.5 * f.side;
            const bool outer = std::abs(p[0]) <= 1.0 && std::abs(p[1]) <= 1.0;
            const bool hole = std::abs(p[0]) < h && std::abs(p[1]) < h;
            return outer && !hole;
          },
          [&](const Disk& d) {
            double s = 0.0;
            for (double c : p) s += c * c;
            return s <= d.radius * d.radius;
          },
          [&](const Box& b) { return AxisBox{b.lo, b.hi}.contains(p); },
      },
      region);
}

/// Exact volume function V(t) for every benchmark shape.
inline double exact_volume(const RegionSpec& region, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::invalid_input, "radius must be finite and >= 0");
  constexpr double pi = std::numbers::pi;
  return std::visit(
      detail::overloaded{
          [&](const Pacman&) {
            // Outside the open first quadrant the dilation is the disk of
            // radius 1 + t. Inside it, it is the union of the t-neighbourhoods
            // of the two unit segments on the axes.
            const double strip = t + 0.25 * pi * t * t;
            double both = 0.0;  // area within t of both segments
            if (t <= 1.0) {
              both = t * t;
            } else {
              using detail::circle_segment_primitive;
              // Column at abscissa u in [0, t] is [0, min(a(u), b(u))] with
              // a = t on [0,1], a = sqrt(t^2 - (u-1)^2) beyond, b = 1 + sqrt(t^2 - u^2).
              const double cross = 0.5 * (1.0 + std::sqrt(2.0 * t * t - 1.0));
              both = t;  // u in [0, 1]
              both += circle_segment_primitive(t, cross - 1.0) - circle_segment_primitive(t, 0.0);
              both += (t - cross) + circle_segment_primitive(t, t) - circle_segment_primitive(t, cross);
            }
            return 0.75 * pi * (1.0 + t) * (1.0 + t) + 2.0 * strip - both;
          },
          [&](const UnionOfSquares& u) {
            const double single = 4.0 + 8.0 * t + pi * t * t;
            const double lambda = u.half_gap;
            if (t <= lambda) return 2.0 * single;
            // Overlap of the two rounded squares facing each other across the gap.
            const double s = std::sqrt(t * t - lambda * lambda);
            const double overlap = 4.0 * (t - lambda) + 2.0 * (t * t * std::asin(s / t) - lambda * s);
            return 2.0 * single - overlap;
          },
          [&](const Frame& f) {
            const double side = f.side;
            if (t <= 0.5 * side) return 4.0 - side * side + 4.0 * (side + 2.0) * t + (pi - 4.0) * t * t;
            return 4.0 + 8.0 * t + pi * t * t;
          },
          [&](const Disk& d) {
            return detail::unit_ball_volume(d.dim) * std::pow(d.radius + t, static_cast<double>(d.dim));
          },
          [&](const Box& b) {
            // Steiner formula for a box in dimension 1..3.
            const std::size_t dim = b.lo.size();
            std::vector<double> e(dim);
            for (std::size_t j = 0; j < dim; ++j) e[j] = b.hi[j] - b.lo[j];
            if (dim == 1) return e[0] + 2.0 * t;
            if (dim == 2) return e[0] * e[1] + 2.0 * (e[0] + e[1]) * t + pi * t * t;
            if (dim == 3)
              return e[0] * e[1] * e[2] + 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]) * t +
                     pi * (e[0] + e[1] + e[2]) * t * t + 4.0 / 3.0 * pi * t * t * t;
            fail(ErrorKind::unsupported_region, "box volume only for dimension 1..3");
          },
      },
      region);
}

inline double area(const RegionSpec& region) { return exact_volume(region, 0.0); }

/// Radius up to which V is a polynomial of degree <= d (infinite for convex shapes).
inline double polynomial_reach(const RegionSpec& region) {
  return std::visit(detail::overloaded{
                        [](const Pacman&) { return 1.0; },
                        [](const UnionOfSquares& u) { return u.half_gap; },
                        [](const Frame& f) { return 0.5 * f.side; },
                        [](const auto&) { return std::numeric_limits<double>::infinity(); },
                    },
                    region);
}

/// Total boundary measure (perimeter in the plane).
inline double boundary_length(const RegionSpec& region) {
  constexpr double pi = std::numbers::pi;
  return std::visit(detail::overloaded{
                        [](const Pacman&) { return 1.5 * pi + 2.0; },
                        [](const UnionOfSquares&) { return 16.0; },
                        [](const Frame& f) { return 8.0 + 4.0 * f.side; },
                        [](const Disk& d) {
                          if (d.dim == 1) return 2.0;
                          return static_cast<double>(d.dim) * detail::unit_ball_volume(d.dim) *
                                 std::pow(d.radius, static_cast<double>(d.dim - 1));
                        },
                        [](const Box& b) {
                          // derivative of the Steiner polynomial at 0
                          const std::size_t dim = b.lo.size();
                          std::vector<double> e(dim);
                          for (std::size_t j = 0; j < dim; ++j) e[j] = b.hi[j] - b.lo[j];
                          if (dim == 1) return 2.0;
                          if (dim == 2) return 2.0 * (e[0] + e[1]);
                          return 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
                        },
                    },
                    region);
}

/// Draws one point uniformly (w.r.t. boundary measure) on the boundary of S.
inline std::vector<double> sample_boundary_point(const RegionSpec& region, CounterRng& rng) {
  constexpr double pi = std::numbers::pi;
  return std::visit(
      detail::overloaded{
          [&](const Pacman&) -> std::vector<double> {
            const double arc = 1.5 * pi;
            double s = rng.uniform(0.0, arc + 2.0);
            if (s < arc) {
              const double phi = 0.5 * pi + s;
              return {std::cos(phi), std::sin(phi)};
            }
            s -= arc;
            if (s < 1.0) return {s, 0.0};
            return {0.0, s - 1.0};
          },
          [&](const UnionOfSquares& u) -> std::vector<double> {
            const double s = rng.uniform(0.0, 16.0);
            if (s < 8.0) return detail::square_perimeter_point(0.0, 1.0, s);
            return detail::square_perimeter_point(2.0 + 2.0 * u.half_gap, 1.0, s - 8.0);
          },
          [&](const Frame& f) -> std::vector<double> {
            const double h = 0.5 * f.side;
            const double s = rng.uniform(0.0, 8.0 + 8.0 * h);
            if (s < 8.0) return detail::square_perimeter_point(0.0, 1.0, s);
            return detail::square_perimeter_point(0.0, h, s - 8.0);
          },
          [&](const Disk& d) -> std::vector<double> {
            if (d.dim == 1) return {rng.uniform() < 0.5 ? -d.radius : d.radius};
            std::vector<double> g(d.dim);
            double norm = 0.0;
            do {
              norm = 0.0;
              for (double& c : g) {
                c = rng.normal();
                norm += c * c;
              }
            } while (norm == 0.0);
            norm = std::sqrt(norm);
            for (double& c : g) c *= d.radius / norm;
            return g;
          },
          [&](const Box& b) -> std::vector<double> {
            // Pick a face with probability proportional to its measure.
            const std::size_t dim = b.lo.size();
            std::vector<double> face(dim);
            double total = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
              double m = 1.0;
              for (std::size_t i = 0; i < dim; ++i)
                if (i != j) m *= b.hi[i] - b.lo[i];
              face[j] = m;
              total += 2.0 * m;
            }
            double s = rng.uniform(0.0, total);
            std::size_t axis = 0;
            while (axis + 1 < dim && s >= 2.0 * face[axis]) s -= 2.0 * face[axis++];
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i) p[i] = rng.uniform(b.lo[i], b.hi[i]);
            p[axis] = s < face[axis] ? b.lo[axis] : b.hi[axis];
            return p;
          },
      },
      region);
}

}  // namespace polyreach
