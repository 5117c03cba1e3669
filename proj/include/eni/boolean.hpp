#pragma once

// Area of polygon intersections and differences.
//
// Two independent routes:
//  * intersection_area() handles any pair of simple polygons by integrating
//    x dy - y dx over the boundary of A n B, assembled from the pieces of
//    each polygon's edges that lie inside the other.
//  * RadialProfile handles polygons that are star-shaped about a shared
//    origin. Their intersection is the radial minimum of the two profiles, so
//    its area is a single merge over both angular breakpoint lists.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "eni/geometry.hpp"

namespace eni {

namespace detail {

// Half of the boundary integral over the parts of `a`'s edges lying in `b`.
// Edges shared with `b` count only if they run the same way and
// `keep_shared` is set, so a coincident edge is integrated exactly once.
inline double clipped_boundary_integral(std::span<const Point2> a, std::span<const Point2> b,
                                        bool keep_shared) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  double sum = 0.0;
  std::vector<double> ts;
  for (std::size_t i = 0; i < na; ++i) {
    const Point2 p = a[i];
    const Point2 q = a[(i + 1) % na];
    const Point2 d = q - p;
    const double len = norm(d);
    if (len == 0.0) continue;
    ts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < nb; ++j) {
      const Point2 r = b[j];
      const Point2 s = b[(j + 1) % nb];
      const Point2 g = s - r;
      const double glen = norm(g);
      if (glen == 0.0) continue;
      const double den = cross(d, g);
      if (std::abs(den) > 1e-12 * len * glen) {
        const double t = cross(r - p, g) / den;
        const double u = cross(r - p, d) / den;
        const double tol_t = kEpsilon / len;
        const double tol_u = kEpsilon / glen;
        if (t > -tol_t && t < 1.0 + tol_t && u > -tol_u && u < 1.0 + tol_u)
          ts.push_back(std::clamp(t, 0.0, 1.0));
      } else if (std::abs(cross(r - p, d)) <= kEpsilon * len) {
        for (Point2 e : {r, s}) {
          const double t = dot(e - p, d) / (len * len);
          if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
      }
    }
    std::sort(ts.begin(), ts.end());
    auto at = [&](double t) { return t == 0.0 ? p : (t == 1.0 ? q : p + t * d); };
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double t0 = ts[k];
      const double t1 = ts[k + 1];
      if ((t1 - t0) * len <= 1e-14) continue;
      const Point2 m = p + (0.5 * (t0 + t1)) * d;
      const Containment c = classify_point(b, m);
      bool take = c == Containment::inside;
      if (c == Containment::boundary && keep_shared) {
        for (std::size_t j = 0; j < nb; ++j) {
          const Segment f{b[j], b[(j + 1) % nb]};
          if (point_segment_distance(m, f) <= kEpsilon) {
            take = dot(d, f.b - f.a) > 0.0;
            break;
          }
        }
      }
      if (take) sum += cross(at(t0), at(t1));
    }
  }
  return 0.5 * sum;
}

}  // namespace detail

/// Area of a n b for simple counterclockwise polygons.
inline double intersection_area(const SimplePolygon& a, const SimplePolygon& b) {
  const std::span<const Point2> va(a.vertices());
  const std::span<const Point2> vb(b.vertices());
  const double area = detail::clipped_boundary_integral(va, vb, true) +
                      detail::clipped_boundary_integral(vb, va, false);
  return std::clamp(area, 0.0, std::min(a.area(), b.area()));
}

/// Snaps differences thinner than kEpsilon along the whole perimeter to zero.
inline double snap_difference(double diff, double perimeter) {
  return diff <= kEpsilon * perimeter ? 0.0 : diff;
}

/// Total area of a \ b (possibly several disjoint pieces).
inline double difference_area(const SimplePolygon& a, const SimplePolygon& b) {
  const double diff = a.area() - intersection_area(a, b);
  return snap_difference(std::max(diff, 0.0), a.perimeter());
}

/// Piecewise-linear radial function r(angle) of a polygon that is
/// star-shaped about the origin, split at angle 0 and at every vertex.
class RadialProfile {
 public:
  /// Builds the profile from vertices relative to the kernel; empty if the
  /// origin is not strictly inside or the polygon is not star-shaped about it.
  static std::optional<RadialProfile> build(std::span<const Point2> rel) {
    const std::size_t n = rel.size();
    if (n < 3) return std::nullopt;
    std::vector<double> ang(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (norm(rel[i]) <= kEpsilon) return std::nullopt;
      ang[i] = polar_angle(rel[i]);
    }
    struct Piece {
      double a0;
      Point2 p;
      Point2 q;
      Point2 dir;
    };
    std::vector<Piece> pieces;
    pieces.reserve(n + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double span = angle_difference(ang[i], ang[j]);
      if (span < -1e-9 || span > std::numbers::pi - 1e-9) return std::nullopt;
      if (span <= 1e-13) continue;  // radial edge
      total += span;
      const Point2 p = rel[i];
      const Point2 q = rel[j];
      if (ang[i] + span > kTwoPi) {
        const Point2 x = ray_line({1.0, 0.0}, p, q);
        pieces.push_back({ang[i], p, x, p * (1.0 / norm(p))});
        pieces.push_back({0.0, x, q, {1.0, 0.0}});
      } else {
        pieces.push_back({ang[i], p, q, p * (1.0 / norm(p))});
      }
    }
    if (std::abs(total - kTwoPi) > 1e-7) return std::nullopt;
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a0 < y.a0; });
    RadialProfile out;
    const std::size_t k = pieces.size();
    out.breaks_.resize(k + 1);
    out.dirs_.resize(k + 1);
    out.start_.resize(k);
    out.end_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      out.breaks_[i] = pieces[i].a0;
      out.dirs_[i] = pieces[i].dir;
      out.start_[i] = pieces[i].p;
      out.end_[i] = pieces[i].q;
    }
    out.breaks_[0] = 0.0;
    out.dirs_[0] = {1.0, 0.0};
    out.breaks_[k] = kTwoPi;
    out.dirs_[k] = {1.0, 0.0};
    out.area_ = 0.0;
    for (std::size_t i = 0; i < k; ++i) out.area_ += 0.5 * cross(out.start_[i], out.end_[i]);
    return out;
  }

  [[nodiscard]] double area() const { return area_; }
  [[nodiscard]] std::size_t pieces() const { return start_.size(); }

  /// Area of the intersection of two profiles sharing their origin.
  friend double intersection_area(const RadialProfile& a, const RadialProfile& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    double lo = 0.0;
    Point2 lo_dir{1.0, 0.0};
    double sum = 0.0;
    const std::size_t ka = a.pieces();
    const std::size_t kb = b.pieces();
    while (i < ka && j < kb) {
      const double ha = a.breaks_[i + 1];
      const double hb = b.breaks_[j + 1];
      const double hi = std::min(ha, hb);
      const Point2 hi_dir = ha <= hb ? a.dirs_[i + 1] : b.dirs_[j + 1];
      if (hi > lo) {
        const Point2 a0 = a.point_at(i, lo, lo_dir);
        const Point2 a1 = a.point_at(i, hi, hi_dir);
        const Point2 b0 = b.point_at(j, lo, lo_dir);
        const Point2 b1 = b.point_at(j, hi, hi_dir);
        sum += wedge_min(a0, a1, b0, b1);
      }
      if (ha <= hb) ++i;
      if (hb <= ha) ++j;
      lo = hi;
      lo_dir = hi_dir;
    }
    return sum;
  }

 private:
  // Point where the ray with direction u meets the line through p and q.
  static Point2 ray_line(Point2 u, Point2 p, Point2 q) {
    const double den = cross(u, q - p);
    if (den == 0.0) return p;
    return (cross(p, q) / den) * u;
  }

  [[nodiscard]] Point2 point_at(std::size_t piece, double angle, Point2 dir) const {
    if (angle == breaks_[piece]) return start_[piece];
    if (angle == breaks_[piece + 1]) return end_[piece];
    return ray_line(dir, start_[piece], end_[piece]);
  }

  // Area of the wedge under min(r_a, r_b) between two rays, where each
  // profile is one straight piece over the wedge.
  static double wedge_min(Point2 a0, Point2 a1, Point2 b0, Point2 b1) {
    const double d0 = dot(a0, a0) - dot(b0, b0);
    const double d1 = dot(a1, a1) - dot(b1, b1);
    if (d0 <= 0.0 && d1 <= 0.0) return 0.5 * cross(a0, a1);
    if (d0 >= 0.0 && d1 >= 0.0) return 0.5 * cross(b0, b1);
    const Point2 da = a1 - a0;
    const Point2 db = b1 - b0;
    const double den = cross(da, db);
    if (den == 0.0) return 0.5 * std::min(cross(a0, a1), cross(b0, b1));
    const Point2 c = a0 + (cross(b0 - a0, db) / den) * da;
    if (d0 < 0.0) return 0.5 * (cross(a0, c) + cross(c, b1));
    return 0.5 * (cross(b0, c) + cross(c, a1));
  }

  std::vector<double> breaks_;
  std::vector<Point2> dirs_;
  std::vector<Point2> start_;
  std::vector<Point2> end_;
  double area_ = 0.0;
};

}  // namespace eni
