#pragma once

// Brute-force reference computations. These deliberately share no code
// path with the library's sweep, clipper or radial merge.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "eni/geometry.hpp"

namespace eni::oracle {

// Even-odd ray crossing test, written independently of classify_point.
inline bool inside(const std::vector<Point2>& poly, Point2 p) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double t = (p.y - a.y) / (b.y - a.y);
      if (p.x < a.x + t * (b.x - a.x)) in = !in;
    }
  }
  return in;
}

// Nearest hit of the ray p + t(cos a, sin a), t > 0, over all edges.
inline double cast_ray(const Environment& env, Point2 p, double angle) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : env.segments()) {
    const double ex = s.b.x - s.a.x;
    const double ey = s.b.y - s.a.y;
    const double den = dx * ey - dy * ex;
    if (den == 0.0) continue;
    const double wx = s.a.x - p.x;
    const double wy = s.a.y - p.y;
    const double t = (wx * ey - wy * ex) / den;
    const double u = (wx * dy - wy * dx) / den;
    if (t > 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
  }
  return best;
}

enum class FanRule { triangles, sectors };

/// Visibility area by a fan of rays `step_deg` apart. The triangle rule joins
/// consecutive hits; the sector rule integrates r^2/2 with rays at bin centres.
inline double ray_fan_area(const Environment& env, Point2 p, double step_deg, FanRule rule) {
  const int n = static_cast<int>(std::lround(360.0 / step_deg));
  const double step = 2.0 * std::numbers::pi / n;
  double area = 0.0;
  if (rule == FanRule::triangles) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = cast_ray(env, p, i * step);
    for (int i = 0; i < n; ++i) area += 0.5 * r[i] * r[(i + 1) % n] * std::sin(step);
  } else {
    for (int i = 0; i < n; ++i) {
      const double r = cast_ray(env, p, (i + 0.5) * step);
      area += 0.5 * r * r * step;
    }
  }
  return area;
}

/// Monte-Carlo estimate of area(a \ b) from uniform samples in a's bounding box.
inline double monte_carlo_difference(const std::vector<Point2>& a, const std::vector<Point2>& b,
                                     std::size_t samples, std::uint64_t seed) {
  double lx = a[0].x, hx = a[0].x, ly = a[0].y, hy = a[0].y;
  for (Point2 v : a) {
    lx = std::min(lx, v.x);
    hx = std::max(hx, v.x);
    ly = std::min(ly, v.y);
    hy = std::max(hy, v.y);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lx, hx);
  std::uniform_real_distribution<double> uy(ly, hy);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point2 q{ux(rng), uy(rng)};
    if (inside(a, q) && !inside(b, q)) ++hits;
  }
  return (hx - lx) * (hy - ly) * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Deterministic grid rasterisation of area(a \ b) at `cells` per axis.
inline double raster_difference(const std::vector<Point2>& a, const std::vector<Point2>& b, int cells) {
  double lx = a[0].x, hx = a[0].x, ly = a[0].y, hy = a[0].y;
  for (Point2 v : a) {
    lx = std::min(lx, v.x);
    hx = std::max(hx, v.x);
    ly = std::min(ly, v.y);
    hy = std::max(hy, v.y);
  }
  const double w = (hx - lx) / cells;
  const double h = (hy - ly) / cells;
  std::size_t hits = 0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const Point2 q{lx + (i + 0.5) * w, ly + (j + 0.5) * h};
      if (inside(a, q) && !inside(b, q)) ++hits;
    }
  }
  return static_cast<double>(hits) * w * h;
}

}  // namespace eni::oracle
