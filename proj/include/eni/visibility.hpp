#pragma once

// Visibility polygon of a point in a polygonal environment with holes, by an
// angular sweep over edge endpoints. The active edges are kept in a balanced
// tree ordered by their distance along the current sweep ray, so the whole
// computation is O(s log s) in the number of environment edges.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "eni/geometry.hpp"

namespace eni {

namespace detail {

// Angular tolerance for grouping events that share a sweep ray.
inline constexpr double kAngleTol = 1e-11;

struct SweepPiece {
  Point2 a;        // relative to the viewpoint, at angle `start`
  Point2 b;        // at angle `end`
  double start;    // sweep-frame angles, start < end
  double end;
  std::size_t id;
};

// Distance from the origin along unit ray u to the line through a and b.
inline double ray_distance(Point2 u, Point2 a, Point2 b) {
  const double den = cross(u, b - a);
  if (den == 0.0) return std::min(norm(a), norm(b));
  return cross(a, b) / den;
}

class SweepOrder {
 public:
  SweepOrder(const std::vector<SweepPiece>* pieces, double origin)
      : pieces_(pieces), origin_(origin) {}

  bool operator()(std::size_t x, std::size_t y) const {
    if (x == y) return false;
    const SweepPiece& px = (*pieces_)[x];
    const SweepPiece& py = (*pieces_)[y];
    const double lo = std::max(px.start, py.start);
    const double hi = std::min(px.end, py.end);
    const Point2 u = unit_vector(origin_ + 0.5 * (lo + std::max(lo, hi)));
    const double rx = ray_distance(u, px.a, px.b);
    const double ry = ray_distance(u, py.a, py.b);
    if (std::abs(rx - ry) > 1e-12 * std::max(rx, ry)) return rx < ry;
    return px.id < py.id;
  }

 private:
  const std::vector<SweepPiece>* pieces_;
  double origin_;
};

}  // namespace detail

/// Region of free space visible from p. Requires p strictly in free space.
inline VisibilityPolygon compute_visibility_polygon(const Environment& env, Point2 p) {
  using detail::kAngleTol;
  using detail::SweepPiece;
  if (!point_in_free_space(env, p))
    throw PointNotInFreeSpace("visibility kernel is not strictly inside free space");

  struct Oriented {
    Point2 a;
    Point2 b;
    double angle_a;
    double span;
  };
  std::vector<Oriented> segs;
  std::vector<double> events;
  segs.reserve(env.segments().size());
  for (const Segment& s : env.segments()) {
    Point2 a = s.a - p;
    Point2 b = s.b - p;
    double aa = polar_angle(a);
    double ab = polar_angle(b);
    double span = angle_difference(aa, ab);
    if (std::abs(span) <= kAngleTol) continue;  // collinear with the viewpoint
    if (span < 0.0) {
      std::swap(a, b);
      std::swap(aa, ab);
      span = -span;
    }
    segs.push_back({a, b, aa, span});
    events.push_back(aa);
    events.push_back(ab);
  }
  if (segs.empty()) throw InvalidGeometry("environment has no occluding edges");

  // Start the sweep in the middle of the widest angular gap between events so
  // no event sits on the initial ray.
  std::sort(events.begin(), events.end());
  double origin = 0.0;
  double widest = -1.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double next = i + 1 < events.size() ? events[i + 1] : events[0] + kTwoPi;
    if (next - events[i] > widest) {
      widest = next - events[i];
      origin = events[i] + 0.5 * widest;
    }
  }
  origin = wrap_angle(origin);

  std::vector<SweepPiece> pieces;
  pieces.reserve(2 * segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    double start = s.angle_a - origin;
    if (start < 0.0) start += kTwoPi;
    const double end = start + s.span;
    if (end > kTwoPi) {
      pieces.push_back({s.a, s.b, start - kTwoPi, end - kTwoPi, i});
      pieces.push_back({s.a, s.b, start, end, i});
    } else {
      pieces.push_back({s.a, s.b, start, end, i});
    }
  }

  struct Event {
    double angle;
    bool insert;
    std::size_t piece;
  };
  std::vector<Event> queue;
  queue.reserve(2 * pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].start >= 0.0) queue.push_back({pieces[i].start, true, i});
    if (pieces[i].end < kTwoPi) queue.push_back({pieces[i].end, false, i});
  }
  std::sort(queue.begin(), queue.end(), [](const Event& x, const Event& y) {
    if (x.angle != y.angle) return x.angle < y.angle;
    return x.insert < y.insert;
  });

  const detail::SweepOrder order(&pieces, origin);
  std::set<std::size_t, detail::SweepOrder> active(order);
  std::vector<std::set<std::size_t, detail::SweepOrder>::iterator> handle(pieces.size(), active.end());
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].start < 0.0) handle[i] = active.insert(i).first;

  auto point_on = [&](std::size_t idx, double angle) -> Point2 {
    const SweepPiece& sp = pieces[idx];
    if (std::abs(angle - sp.start) <= kAngleTol) return sp.a;
    if (std::abs(angle - sp.end) <= kAngleTol) return sp.b;
    const Point2 u = unit_vector(origin + angle);
    return detail::ray_distance(u, sp.a, sp.b) * u;
  };

  std::vector<Point2> out;
  out.reserve(2 * pieces.size() + 1);
  if (active.empty()) throw InvalidGeometry("viewpoint is not enclosed by the environment");
  out.push_back(point_on(*active.begin(), 0.0));

  std::size_t k = 0;
  while (k < queue.size()) {
    const double alpha = queue[k].angle;
    std::size_t g = k;
    while (g < queue.size() && queue[g].angle - alpha <= kAngleTol) ++g;
    const std::size_t before = active.empty() ? pieces.size() : *active.begin();
    for (std::size_t e = k; e < g; ++e) {
      if (!queue[e].insert && handle[queue[e].piece] != active.end()) {
        active.erase(handle[queue[e].piece]);
        handle[queue[e].piece] = active.end();
      }
    }
    for (std::size_t e = k; e < g; ++e) {
      const std::size_t idx = queue[e].piece;
      if (queue[e].insert && pieces[idx].end - alpha > kAngleTol)
        handle[idx] = active.insert(idx).first;
    }
    if (active.empty()) throw InvalidGeometry("viewpoint is not enclosed by the environment");
    const std::size_t after = *active.begin();
    if (before != after) {
      if (before < pieces.size()) out.push_back(point_on(before, alpha));
      out.push_back(point_on(after, alpha));
    }
    k = g;
  }

  // Drop duplicates and collinear interior points, then restore world frame.
  std::vector<Point2> clean;
  clean.reserve(out.size());
  for (Point2 v : out)
    if (clean.empty() || distance(clean.back(), v) > 4.0 * kEpsilon) clean.push_back(v);
  while (clean.size() > 1 && distance(clean.front(), clean.back()) <= 4.0 * kEpsilon) clean.pop_back();
  bool changed = true;
  while (changed && clean.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < clean.size() && clean.size() > 3; ++i) {
      const Point2 prev = clean[(i + clean.size() - 1) % clean.size()];
      const Point2 next = clean[(i + 1) % clean.size()];
      const Point2 cur = clean[i];
      const double scale = distance(prev, cur) * distance(cur, next);
      if (std::abs(orient(prev, cur, next)) <= 1e-12 * scale && dot(cur - prev, next - cur) > 0.0) {
        clean.erase(clean.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  for (Point2& v : clean) v = v + p;
  return {p, SimplePolygon(std::move(clean), SimplePolygon::Check::basic)};
}

}  // namespace eni
