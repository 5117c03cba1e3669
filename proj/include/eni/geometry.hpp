#pragma once

// Planar kernel: points, simple polygons, environments with holes and
// visibility polygons. All lengths are meters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eni/errors.hpp"

namespace eni {

/// Coincidence / on-boundary tolerance in meters.
inline constexpr double kEpsilon = 1e-9;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Twice the signed area of triangle abc; positive when counterclockwise.
constexpr double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

inline Point2 rotate(Point2 v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Point2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Angle of v in [0, 2pi).
inline double polar_angle(Point2 v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

/// Signed difference b - a mapped into (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::remainder(b - a, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Segment {
  Point2 a;
  Point2 b;
};

inline Point2 closest_point_on_segment(const Segment& s, Point2 p) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + t * d;
}

inline double point_segment_distance(Point2 p, const Segment& s) {
  return distance(p, closest_point_on_segment(s, p));
}

namespace detail {

inline bool on_segment_closed(Point2 p, const Segment& s) {
  return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
         std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

/// True when the closed segments share at least one point.
inline bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = detail::sign(orient(s.a, s.b, t.a));
  const int o2 = detail::sign(orient(s.a, s.b, t.b));
  const int o3 = detail::sign(orient(t.a, t.b, s.a));
  const int o4 = detail::sign(orient(t.a, t.b, s.b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && detail::on_segment_closed(t.a, s)) return true;
  if (o2 == 0 && detail::on_segment_closed(t.b, s)) return true;
  if (o3 == 0 && detail::on_segment_closed(s.a, t)) return true;
  if (o4 == 0 && detail::on_segment_closed(s.b, t)) return true;
  return false;
}

inline double segment_segment_distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

inline double signed_area(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

/// Polygon with canonical counterclockwise winding and at least three
/// distinct vertices. The full validation level also rejects
/// self-intersections.
class SimplePolygon {
 public:
  enum class Check { full, basic };

  SimplePolygon() = default;

  explicit SimplePolygon(std::vector<Point2> vertices, Check check = Check::full)
      : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw InvalidGeometry("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_finite(vertices_[i])) throw InvalidGeometry("non-finite polygon coordinate");
      if (distance(vertices_[i], vertices_[(i + 1) % n]) <= kEpsilon)
        throw InvalidGeometry("consecutive polygon vertices coincide");
    }
    const double a = signed_area(vertices_);
    if (std::abs(a) <= kEpsilon * kEpsilon) throw InvalidGeometry("degenerate polygon (zero area)");
    if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
    if (check == Check::full && self_intersects())
      throw InvalidGeometry("polygon is self-intersecting");
  }

  [[nodiscard]] const std::vector<Point2>& vertices() const { return vertices_; }
  [[nodiscard]] std::size_t size() const { return vertices_.size(); }
  [[nodiscard]] Point2 operator[](std::size_t i) const { return vertices_[i]; }
  [[nodiscard]] Segment edge(std::size_t i) const {
    return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
  }

  [[nodiscard]] double area() const { return signed_area(vertices_); }

  [[nodiscard]] double perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0; i < size(); ++i) p += distance(vertices_[i], vertices_[(i + 1) % size()]);
    return p;
  }

  friend bool operator==(const SimplePolygon&, const SimplePolygon&) = default;

 private:
  [[nodiscard]] bool self_intersects() const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        const Segment si = edge(i);
        const Segment sj = edge(j);
        if (adjacent) {
          // Adjacent edges may only share their common vertex: reject folds.
          const Point2 shared = (j == i + 1) ? si.b : si.a;
          const Point2 other_i = (j == i + 1) ? si.a : si.b;
          const Point2 other_j = (j == i + 1) ? sj.b : sj.a;
          if (std::abs(orient(other_i, shared, other_j)) <= kEpsilon * distance(other_i, shared) &&
              dot(other_i - shared, other_j - shared) > 0.0)
            return true;
          continue;
        }
        if (segments_intersect(si, sj)) return true;
      }
    }
    return false;
  }

  std::vector<Point2> vertices_;
};

/// Shoelace area of a valid polygon.
inline double polygon_area(const SimplePolygon& poly) {
  if (poly.size() < 3) throw InvalidGeometry("polygon needs at least 3 vertices");
  return poly.area();
}

enum class Containment { outside, boundary, inside };

/// Classifies p against a polygon; points within tol of an edge are on the boundary.
inline Containment classify_point(std::span<const Point2> poly, Point2 p, double tol = kEpsilon) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[j];
    const Point2 b = poly[i];
    if (point_segment_distance(p, {a, b}) <= tol) return Containment::boundary;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside ? Containment::inside : Containment::outside;
}

inline Containment classify_point(const SimplePolygon& poly, Point2 p, double tol = kEpsilon) {
  return classify_point(std::span<const Point2>(poly.vertices()), p, tol);
}

/// Outer boundary with obstacle holes. Construction validates that every
/// obstacle sits strictly inside the boundary and obstacles are disjoint.
class Environment {
 public:
  Environment() = default;

  Environment(SimplePolygon boundary, std::vector<SimplePolygon> obstacles, std::string name = {})
      : name_(std::move(name)), boundary_(std::move(boundary)), obstacles_(std::move(obstacles)) {
    if (boundary_.size() < 3) throw InvalidGeometry("environment boundary is empty");
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      const auto& ob = obstacles_[i];
      for (Point2 v : ob.vertices()) {
        if (classify_point(boundary_, v) != Containment::inside)
          throw InvalidGeometry("obstacle not strictly inside boundary");
      }
      if (polygons_touch(ob, boundary_)) throw InvalidGeometry("obstacle not strictly inside boundary");
      for (std::size_t j = 0; j < i; ++j) {
        const auto& other = obstacles_[j];
        if (polygons_touch(ob, other) || classify_point(other, ob[0]) != Containment::outside ||
            classify_point(ob, other[0]) != Containment::outside)
          throw InvalidGeometry("obstacles overlap");
      }
    }
    segments_.reserve(edge_count());
    auto add = [this](const SimplePolygon& p) {
      for (std::size_t i = 0; i < p.size(); ++i) segments_.push_back(p.edge(i));
    };
    add(boundary_);
    for (const auto& ob : obstacles_) add(ob);
    if (free_area() <= 0.0) throw EmptyFreeSpace("environment has no free space");
  }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const SimplePolygon& boundary() const { return boundary_; }
  [[nodiscard]] const std::vector<SimplePolygon>& obstacles() const { return obstacles_; }
  /// Every boundary and obstacle edge.
  [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }

  [[nodiscard]] std::size_t edge_count() const {
    std::size_t n = boundary_.size();
    for (const auto& ob : obstacles_) n += ob.size();
    return n;
  }

  [[nodiscard]] double free_area() const {
    double a = boundary_.area();
    for (const auto& ob : obstacles_) a -= ob.area();
    return a;
  }

  /// Distance from p to the nearest boundary or obstacle edge.
  [[nodiscard]] double clearance(Point2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) d = std::min(d, point_segment_distance(p, s));
    return d;
  }

  [[nodiscard]] std::pair<Point2, Point2> bounding_box() const {
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi = -lo;
    for (Point2 v : boundary_.vertices()) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    return {lo, hi};
  }

  /// Largest distance between two boundary vertices.
  [[nodiscard]] double diameter() const {
    double d = 0.0;
    const auto& v = boundary_.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, distance(v[i], v[j]));
    return d;
  }

  friend bool operator==(const Environment& a, const Environment& b) {
    return a.name_ == b.name_ && a.boundary_ == b.boundary_ && a.obstacles_ == b.obstacles_;
  }

 private:
  static bool polygons_touch(const SimplePolygon& a, const SimplePolygon& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (segment_segment_distance(a.edge(i), b.edge(j)) <= kEpsilon) return true;
    return false;
  }

  std::string name_;
  SimplePolygon boundary_;
  std::vector<SimplePolygon> obstacles_;
  std::vector<Segment> segments_;
};

/// True iff p is inside the boundary and outside every obstacle, with
/// points within kEpsilon of any edge counted as outside.
inline bool point_in_free_space(const Environment& env, Point2 p) {
  if (!is_finite(p)) return false;
  if (classify_point(env.boundary(), p) != Containment::inside) return false;
  for (const auto& ob : env.obstacles())
    if (classify_point(ob, p) != Containment::outside) return false;
  return true;
}

/// Star-shaped region seen from its kernel.
class VisibilityPolygon {
 public:
  VisibilityPolygon() = default;
  VisibilityPolygon(Point2 kernel, SimplePolygon polygon)
      : kernel_(kernel), polygon_(std::move(polygon)) {}

  [[nodiscard]] Point2 kernel() const { return kernel_; }
  [[nodiscard]] const SimplePolygon& polygon() const { return polygon_; }
  [[nodiscard]] double area() const { return polygon_.area(); }

  friend bool operator==(const VisibilityPolygon&, const VisibilityPolygon&) = default;

 private:
  Point2 kernel_{};
  SimplePolygon polygon_;
};

/// Rotates every vertex counterclockwise by theta about the kernel.
inline VisibilityPolygon rotate_about_kernel(const VisibilityPolygon& vp, double theta) {
  if (theta == 0.0) return vp;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Point2 k = vp.kernel();
  std::vector<Point2> out;
  out.reserve(vp.polygon().size());
  for (Point2 v : vp.polygon().vertices()) {
    const Point2 d = v - k;
    out.push_back(Point2{c * d.x - s * d.y, s * d.x + c * d.y} + k);
  }
  return {k, SimplePolygon(std::move(out), SimplePolygon::Check::basic)};
}

/// Rigid translation of a visibility polygon so its kernel lands on `to`.
inline VisibilityPolygon translate_kernel_to(const VisibilityPolygon& vp, Point2 to) {
  const Point2 d = to - vp.kernel();
  std::vector<Point2> out;
  out.reserve(vp.polygon().size());
  for (Point2 v : vp.polygon().vertices()) out.push_back(v + d);
  return {to, SimplePolygon(std::move(out), SimplePolygon::Check::basic)};
}

}  // namespace eni
