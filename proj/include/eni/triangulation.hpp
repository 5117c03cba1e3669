#pragma once

// Conforming constrained Delaunay triangulation of an environment's free
// space with a maximum-area constraint.
//
// The mesh is an ordinary Delaunay triangulation (Bowyer-Watson insertion
// inside a bounding box). Environment edges are enforced by splitting any
// subsegment that is missing from the mesh or encroached (a vertex strictly
// inside its diametral circle), so every edge ends up as a union of Delaunay
// edges and each triangle lies entirely inside or outside free space.
// Triangles larger than the area bound, or badly shaped at the target scale,
// are refined by circumcenter insertion, deferring to a segment split when
// the circumcenter would encroach.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "eni/geometry.hpp"

namespace eni {

struct Triangle {
  std::array<Point2, 3> v;

  [[nodiscard]] double area() const { return 0.5 * orient(v[0], v[1], v[2]); }
  [[nodiscard]] Point2 centroid() const {
    return {(v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0};
  }
};

namespace detail {

inline double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return static_cast<double>(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                             ad * (bdx * cdy - bdy * cdx));
}

inline Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return a + Point2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

/// Incremental Delaunay triangulation inside a fixed bounding box.
class DelaunayMesh {
 public:
  struct Tri {
    std::array<int, 3> v;  // counterclockwise
    std::array<int, 3> n;  // n[i]: neighbour across the edge opposite v[i]
    bool alive = true;
  };

  DelaunayMesh(Point2 lo, Point2 hi) {
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double m = 3.0 * span + 1.0;
    pts_ = {{lo.x - m, lo.y - m}, {hi.x + m, lo.y - m}, {hi.x + m, hi.y + m}, {lo.x - m, hi.y + m}};
    tris_.push_back({{0, 1, 2}, {-1, 1, -1}});
    tris_.push_back({{0, 2, 3}, {-1, -1, 0}});
  }

  static constexpr int kBoxVertices = 4;

  [[nodiscard]] const std::vector<Point2>& points() const { return pts_; }
  [[nodiscard]] const std::vector<Tri>& triangles() const { return tris_; }

  /// Inserts p; returns its index, or the index of an existing vertex
  /// closer than `merge_tol`.
  int insert(Point2 p, double merge_tol) {
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k) {
      const int v = tris_[t0].v[k];
      if (distance(pts_[v], p) <= merge_tol) return v;
    }
    const int idx = static_cast<int>(pts_.size());
    pts_.push_back(p);

    // Cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity{t0};
    in_cavity_.resize(tris_.size(), 0);
    in_cavity_[t0] = 1;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
      const Tri& t = tris_[cavity[q]];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.n[k];
        if (nb < 0 || in_cavity_[nb]) continue;
        const Tri& u = tris_[nb];
        if (incircle(pts_[u.v[0]], pts_[u.v[1]], pts_[u.v[2]], p) > 0.0) {
          in_cavity_[nb] = 1;
          cavity.push_back(nb);
        }
      }
    }
    // Keep the cavity star-shaped from p: drop triangles that would leave a
    // boundary edge p cannot see, or pull in the neighbour if p sits on it.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t q = 0; q < cavity.size() && !changed; ++q) {
        const Tri& t = tris_[cavity[q]];
        for (int k = 0; k < 3 && !changed; ++k) {
          const int nb = t.n[k];
          if (nb >= 0 && in_cavity_[nb]) continue;
          const Point2 a = pts_[t.v[(k + 1) % 3]];
          const Point2 b = pts_[t.v[(k + 2) % 3]];
          if (orient(a, b, p) > 0.0) continue;
          if (cavity[q] == t0 || nb < 0) {
            if (nb >= 0) {
              in_cavity_[nb] = 1;
              cavity.push_back(nb);
              changed = true;
            }
          } else {
            in_cavity_[cavity[q]] = 0;
            cavity.erase(cavity.begin() + static_cast<std::ptrdiff_t>(q));
            changed = true;
          }
        }
      }
    }

    struct Rim {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int c : cavity) {
      const Tri& t = tris_[c];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.n[k];
        if (nb >= 0 && in_cavity_[nb]) continue;
        rim.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
      }
    }
    for (int c : cavity) {
      in_cavity_[c] = 0;
      tris_[c].alive = false;
    }

    std::vector<int> slots(cavity.begin(), cavity.end());
    std::sort(slots.begin(), slots.end());
    while (slots.size() < rim.size()) {
      slots.push_back(static_cast<int>(tris_.size()));
      tris_.push_back({});
    }
    in_cavity_.resize(tris_.size(), 0);
    std::unordered_map<int, int> by_start;
    std::unordered_map<int, int> by_end;
    for (std::size_t r = 0; r < rim.size(); ++r) {
      const int slot = slots[r];
      const Rim& e = rim[r];
      // Vertex order (a, b, p): opposite a is (b, p), opposite b is (p, a).
      tris_[slot] = {{e.a, e.b, idx}, {-1, -1, e.outside}, true};
      by_start[e.a] = slot;
      by_end[e.b] = slot;
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int k = 0; k < 3; ++k) {
          const int oa = o.v[(k + 1) % 3];
          const int ob = o.v[(k + 2) % 3];
          if (oa == e.b && ob == e.a) o.n[k] = slot;
        }
      }
    }
    for (std::size_t r = 0; r < rim.size(); ++r) {
      Tri& t = tris_[slots[r]];
      t.n[0] = by_start.at(t.v[1]);  // edge (b, p) is shared with the triangle starting at b
      t.n[1] = by_end.at(t.v[0]);    // edge (p, a) is shared with the triangle ending at a
    }
    for (std::size_t s = rim.size(); s < slots.size(); ++s) tris_[slots[s]].alive = false;
    last_ = slots.front();
    return idx;
  }

 private:
  int locate(Point2 p) {
    int t = (last_ >= 0 && last_ < static_cast<int>(tris_.size()) && tris_[last_].alive) ? last_ : first_alive();
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        if (side(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], p) < 0.0 && tri.n[k] >= 0) {
          next = tri.n[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk failed to settle; fall back to a scan.
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& tri = tris_[i];
      if (!tri.alive) continue;
      if (side(tri.v[0], tri.v[1], p) >= 0.0 && side(tri.v[1], tri.v[2], p) >= 0.0 &&
          side(tri.v[2], tri.v[0], p) >= 0.0)
        return static_cast<int>(i);
    }
    throw InvalidGeometry("point outside triangulation domain");
  }

  // orient() evaluated with the endpoints in index order, so the two
  // triangles sharing an edge always disagree exactly.
  [[nodiscard]] double side(int a, int b, Point2 p) const {
    return a < b ? orient(pts_[a], pts_[b], p) : -orient(pts_[b], pts_[a], p);
  }

  int first_alive() const {
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (tris_[i].alive) return static_cast<int>(i);
    return 0;
  }

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<char> in_cavity_;
  int last_ = 0;
};

/// Refined mesh of an environment plus the bookkeeping needed to pick
/// interior vertices.
struct RefinedMesh {
  DelaunayMesh mesh;
  std::vector<char> on_segment;  // per vertex: lies on an environment edge
  std::vector<char> inside;      // per triangle: inside free space
};

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

inline RefinedMesh refine_free_space(const Environment& env, double max_area,
                                     std::size_t max_vertices = 400000) {
  if (!(max_area > 0.0) || !std::isfinite(max_area)) throw InvalidInput("max_area must be positive");
  if (env.free_area() <= 0.0) throw EmptyFreeSpace("environment has no free space");

  const auto [lo, hi] = env.bounding_box();
  RefinedMesh out{DelaunayMesh(lo, hi), {}, {}};
  DelaunayMesh& mesh = out.mesh;
  const double merge_tol = 1e-9 * std::max(1.0, distance(lo, hi));
  out.on_segment.assign(DelaunayMesh::kBoxVertices, 0);

  // Edges start out divided into pieces no longer than the side of an
  // equilateral triangle of area max_area. Plain midpoint splitting alone
  // makes the vertex count jump in powers of two on regular rooms.
  const double edge_len = std::sqrt(4.0 * max_area / std::sqrt(3.0));
  std::vector<std::pair<int, int>> subsegs;
  auto add_polygon = [&](const SimplePolygon& poly) {
    std::vector<int> ids;
    auto put = [&](Point2 v) {
      ids.push_back(mesh.insert(v, merge_tol));
      out.on_segment.resize(mesh.points().size(), 0);
      out.on_segment[ids.back()] = 1;
    };
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Segment e = poly.edge(i);
      const double pieces = std::ceil(distance(e.a, e.b) / edge_len);
      put(e.a);
      for (double k = 1; k < pieces; ++k) put(e.a + (k / pieces) * (e.b - e.a));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) subsegs.push_back({ids[i], ids[(i + 1) % ids.size()]});
  };
  add_polygon(env.boundary());
  for (const auto& ob : env.obstacles()) add_polygon(ob);

  const double min_split = 1e-4 * std::sqrt(max_area);
  auto split = [&](std::size_t s) {
    const auto [a, b] = subsegs[s];
    const Point2 m = 0.5 * (mesh.points()[a] + mesh.points()[b]);
    const int v = mesh.insert(m, merge_tol);
    out.on_segment.resize(mesh.points().size(), 0);
    out.on_segment[v] = 1;
    subsegs[s] = {a, v};
    subsegs.push_back({v, b});
  };
  auto seg_length = [&](std::size_t s) {
    return distance(mesh.points()[subsegs[s].first], mesh.points()[subsegs[s].second]);
  };
  auto encroaches = [&](std::size_t s, Point2 p) {
    const Point2 a = mesh.points()[subsegs[s].first];
    const Point2 b = mesh.points()[subsegs[s].second];
    return dot(a - p, b - p) < -1e-12 * dot(b - a, b - a);
  };

  const double quality_radius = 0.5 * std::sqrt(max_area);
  for (int round = 0;; ++round) {
    if (mesh.points().size() > max_vertices) throw InvalidInput("triangulation exceeded its vertex budget");

    // Make every subsegment a present, unencroached Delaunay edge.
    for (int pass = 0;; ++pass) {
      std::unordered_map<std::uint64_t, std::array<int, 2>> apex;
      const auto& tris = mesh.triangles();
      for (const auto& t : tris) {
        if (!t.alive) continue;
        for (int k = 0; k < 3; ++k) {
          auto [it, fresh] = apex.try_emplace(edge_key(t.v[(k + 1) % 3], t.v[(k + 2) % 3]), std::array<int, 2>{-1, -1});
          it->second[fresh ? 0 : 1] = t.v[k];
        }
      }
      std::vector<std::size_t> bad;
      for (std::size_t s = 0; s < subsegs.size(); ++s) {
        const auto it = apex.find(edge_key(subsegs[s].first, subsegs[s].second));
        bool split_it = it == apex.end();
        if (!split_it) {
          for (int v : it->second)
            if (v >= DelaunayMesh::kBoxVertices && encroaches(s, mesh.points()[v])) split_it = true;
        }
        if (split_it) bad.push_back(s);
      }
      if (bad.empty()) break;
      bool progressed = false;
      for (std::size_t s : bad) {
        if (seg_length(s) < min_split) continue;
        split(s);
        progressed = true;
      }
      if (!progressed) break;
      if (mesh.points().size() > max_vertices) throw InvalidInput("triangulation exceeded its vertex budget");
    }

    // Classify triangles and collect those that are too large or too skinny.
    const auto& pts = mesh.points();
    const auto& tris = mesh.triangles();
    out.inside.assign(tris.size(), 0);
    struct Bad {
      double area;
      int tri;
      std::array<int, 3> v;
    };
    std::vector<Bad> bad;
    for (std::size_t i = 0; i < tris.size(); ++i) {
      const auto& t = tris[i];
      if (!t.alive) continue;
      if (t.v[0] < DelaunayMesh::kBoxVertices || t.v[1] < DelaunayMesh::kBoxVertices ||
          t.v[2] < DelaunayMesh::kBoxVertices)
        continue;
      const Triangle tri{{pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]}};
      if (!point_in_free_space(env, tri.centroid())) continue;
      out.inside[i] = 1;
      const double area = tri.area();
      bool refine = area > max_area;
      if (!refine) {
        const Point2 cc = circumcenter(tri.v[0], tri.v[1], tri.v[2]);
        const double radius = distance(cc, tri.v[0]);
        const double shortest = std::min({distance(tri.v[0], tri.v[1]), distance(tri.v[1], tri.v[2]),
                                           distance(tri.v[2], tri.v[0])});
        refine = radius > quality_radius && radius > std::sqrt(2.0) * shortest;
      }
      if (refine) bad.push_back({area, static_cast<int>(i), t.v});
    }
    if (bad.empty()) break;
    std::sort(bad.begin(), bad.end(), [](const Bad& x, const Bad& y) {
      if (x.area != y.area) return x.area > y.area;
      return x.tri < y.tri;
    });

    bool progressed = false;
    for (const Bad& b : bad) {
      const auto& t = mesh.triangles()[b.tri];
      if (!t.alive || t.v != b.v) continue;
      const auto& p = mesh.points();
      const Point2 cc = circumcenter(p[b.v[0]], p[b.v[1]], p[b.v[2]]);
      std::vector<std::size_t> hit;
      for (std::size_t s = 0; s < subsegs.size(); ++s)
        if (encroaches(s, cc) && seg_length(s) >= min_split) hit.push_back(s);
      if (!hit.empty()) {
        for (std::size_t s : hit) split(s);
        progressed = true;
        continue;
      }
      Point2 target = cc;
      if (!std::isfinite(cc.x) || !std::isfinite(cc.y) || !point_in_free_space(env, cc)) {
        target = Triangle{{p[b.v[0]], p[b.v[1]], p[b.v[2]]}}.centroid();
      }
      const std::size_t before = mesh.points().size();
      mesh.insert(target, merge_tol);
      out.on_segment.resize(mesh.points().size(), 0);
      progressed = progressed || mesh.points().size() != before;
      if (mesh.points().size() > max_vertices) throw InvalidInput("triangulation exceeded its vertex budget");
    }
    if (!progressed) break;
  }
  return out;
}

}  // namespace detail

/// Triangles of a conforming Delaunay triangulation of free space, each with
/// area at most `max_area`.
inline std::vector<Triangle> triangulate_free_space(const Environment& env, double max_area) {
  const detail::RefinedMesh refined = detail::refine_free_space(env, max_area);
  std::vector<Triangle> out;
  const auto& pts = refined.mesh.points();
  const auto& tris = refined.mesh.triangles();
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (!refined.inside[i]) continue;
    out.push_back({{pts[tris[i].v[0]], pts[tris[i].v[1]], pts[tris[i].v[2]]}});
  }
  return out;
}

}  // namespace eni
