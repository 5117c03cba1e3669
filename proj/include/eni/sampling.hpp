#pragma once

// Uniform free-space sampling: the interior vertices of a refined
// triangulation, each paired with its visibility polygon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eni/geometry.hpp"
#include "eni/parallel.hpp"
#include "eni/triangulation.hpp"
#include "eni/visibility.hpp"

namespace eni {

struct SampleSet {
  std::vector<Point2> points;
  std::vector<VisibilityPolygon> vis_polygons;  // vis_polygons[i].kernel() == points[i]
  double max_area_used = 0.0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

namespace detail {

inline double snap(double v) { return std::round(v * 1e9) / 1e9 + 0.0; }

/// Rigid frame that depends only on the shape of an environment, so
/// congruent environments triangulate identically.
struct CanonicalFrame {
  Point2 origin;
  double angle = 0.0;

  [[nodiscard]] Point2 to_canonical(Point2 p) const {
    const Point2 r = rotate(p - origin, -angle);
    return {snap(r.x), snap(r.y)};
  }
  [[nodiscard]] Point2 to_world(Point2 p) const { return rotate(p, angle) + origin; }
};

inline Point2 area_centroid(const SimplePolygon& poly) {
  const auto& v = poly.vertices();
  const Point2 ref = v[0];
  double a = 0.0;
  Point2 c{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 p = v[i] - ref;
    const Point2 q = v[(i + 1) % v.size()] - ref;
    const double w = cross(p, q);
    a += w;
    c = c + w * (p + q);
  }
  return ref + (1.0 / (3.0 * a)) * c;
}

struct CanonicalEnvironment {
  CanonicalFrame frame;
  Environment env;
};

inline std::vector<Point2> start_at(std::vector<Point2> v, std::size_t first) {
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(first), v.end());
  return v;
}

inline CanonicalEnvironment canonicalize(const Environment& env) {
  const Point2 origin = area_centroid(env.boundary());
  const auto& bv = env.boundary().vertices();
  double far = 0.0;
  for (Point2 v : bv) far = std::max(far, distance(v, origin));

  std::vector<double> best_key;
  CanonicalEnvironment best{{origin, 0.0}, env};
  bool have = false;
  for (std::size_t c = 0; c < bv.size(); ++c) {
    if (distance(bv[c], origin) < far * (1.0 - 1e-9)) continue;
    const CanonicalFrame frame{origin, polar_angle(bv[c] - origin)};
    std::vector<Point2> boundary;
    for (Point2 v : bv) boundary.push_back(frame.to_canonical(v));
    boundary = start_at(std::move(boundary), c);
    std::vector<std::vector<Point2>> holes;
    for (const auto& ob : env.obstacles()) {
      std::vector<Point2> h;
      for (Point2 v : ob.vertices()) h.push_back(frame.to_canonical(v));
      const auto first = std::min_element(h.begin(), h.end(), [](Point2 a, Point2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
      });
      holes.push_back(start_at(h, static_cast<std::size_t>(first - h.begin())));
    }
    std::sort(holes.begin(), holes.end(), [](const auto& a, const auto& b) {
      return a[0].x != b[0].x ? a[0].x < b[0].x : a[0].y < b[0].y;
    });
    std::vector<double> key;
    for (Point2 v : boundary) key.insert(key.end(), {v.x, v.y});
    for (const auto& h : holes)
      for (Point2 v : h) key.insert(key.end(), {v.x, v.y});
    if (have && !(key < best_key)) continue;
    std::vector<SimplePolygon> obstacles;
    for (auto& h : holes) obstacles.emplace_back(std::move(h));
    best = {frame, Environment(SimplePolygon(std::move(boundary)), std::move(obstacles), env.name())};
    best_key = std::move(key);
    have = true;
  }
  return best;
}

// Interior (non-edge) vertices of a refined mesh, in insertion order.
inline std::vector<Point2> interior_vertices(const RefinedMesh& refined, const Environment& env) {
  std::vector<Point2> out;
  const auto& pts = refined.mesh.points();
  for (std::size_t i = DelaunayMesh::kBoxVertices; i < pts.size(); ++i) {
    if (refined.on_segment[i]) continue;
    if (point_in_free_space(env, pts[i])) out.push_back(pts[i]);
  }
  return out;
}

}  // namespace detail

/// Computes a visibility polygon at every point, preserving order.
inline std::vector<VisibilityPolygon> visibility_polygons(const Environment& env, const std::vector<Point2>& points) {
  std::vector<VisibilityPolygon> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = compute_visibility_polygon(env, points[i]); });
  return out;
}

/// Samples at a fixed triangle-area bound.
inline SampleSet sample_with_max_area(const Environment& env, double max_area) {
  const detail::CanonicalEnvironment canon = detail::canonicalize(env);
  const auto refined = detail::refine_free_space(canon.env, max_area);
  SampleSet out;
  out.max_area_used = max_area;
  for (Point2 p : detail::interior_vertices(refined, canon.env)) {
    const Point2 w = canon.frame.to_world(p);
    if (point_in_free_space(env, w)) out.points.push_back(w);
  }
  out.vis_polygons = visibility_polygons(env, out.points);
  return out;
}

/// Samples roughly `target_count` points (within 10%) by bisecting the
/// triangle-area bound over [A/1e5, A] for free area A.
inline SampleSet sample_points(const Environment& env, std::size_t target_count) {
  if (target_count < 10) throw InvalidInput("target_count must be at least 10");
  const detail::CanonicalEnvironment canon = detail::canonicalize(env);
  const double area = canon.env.free_area();
  if (!(area > 0.0)) throw EmptyFreeSpace("environment has no free space");
  const double low_ok = 0.9 * static_cast<double>(target_count);
  const double high_ok = 1.1 * static_cast<double>(target_count);

  double lo = std::log(area / 1e5);
  double hi = std::log(area);
  std::size_t closest = 0;
  for (int step = 0; step < 30; ++step) {
    const double max_area = std::exp(0.5 * (lo + hi));
    const auto refined = detail::refine_free_space(canon.env, max_area);
    const std::vector<Point2> pts = detail::interior_vertices(refined, canon.env);
    const auto n = static_cast<double>(pts.size());
    if (std::abs(n - static_cast<double>(target_count)) <
        std::abs(static_cast<double>(closest) - static_cast<double>(target_count)))
      closest = pts.size();
    if (n >= low_ok && n <= high_ok) {
      SampleSet out;
      out.max_area_used = max_area;
      for (Point2 p : pts) {
        const Point2 w = canon.frame.to_world(p);
        if (point_in_free_space(env, w)) out.points.push_back(w);
      }
      out.vis_polygons = visibility_polygons(env, out.points);
      return out;
    }
    if (n > high_ok) {
      lo = 0.5 * (lo + hi);
    } else {
      hi = 0.5 * (lo + hi);
    }
  }
  throw SamplingFailed("could not reach " + std::to_string(target_count) + " samples (closest: " +
                           std::to_string(closest) + ")",
                       closest);
}

}  // namespace eni
