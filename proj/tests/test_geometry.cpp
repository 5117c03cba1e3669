#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eni/boolean.hpp"
#include "eni/geometry.hpp"
#include "eni/visibility.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace eni {
namespace {

SimplePolygon square(double x0, double y0, double x1, double y1) {
  return SimplePolygon(gen::rectangle(x0, y0, x1, y1));
}

Environment room(double w, double h, std::vector<SimplePolygon> obstacles = {}) {
  return Environment(square(0, 0, w, h), std::move(obstacles));
}

TEST(PolygonArea, UnitSquare) { EXPECT_DOUBLE_EQ(polygon_area(square(0, 0, 1, 1)), 1.0); }

TEST(PolygonArea, Triangle) {
  EXPECT_DOUBLE_EQ(polygon_area(SimplePolygon({{0, 0}, {4, 0}, {0, 3}})), 6.0);
}

TEST(PolygonArea, RegularHexagon) {
  std::vector<Point2> v;
  for (int i = 0; i < 6; ++i) v.push_back(unit_vector(i * std::numbers::pi / 3.0));
  EXPECT_NEAR(polygon_area(SimplePolygon(v)), 3.0 * std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(PolygonArea, ClockwiseInputIsNormalized) {
  SimplePolygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(cw.area(), 0.0);
  EXPECT_DOUBLE_EQ(cw.area(), 1.0);
}

TEST(PolygonArea, DegenerateRejected) {
  EXPECT_THROW(SimplePolygon({{0, 0}, {1, 0}}), InvalidGeometry);
  EXPECT_THROW(SimplePolygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), InvalidGeometry);
  EXPECT_THROW(SimplePolygon({{0, 0}, {1, 0}, {2, 0}}), InvalidGeometry);
}

TEST(PolygonArea, SelfIntersectionRejected) {
  EXPECT_THROW(SimplePolygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidGeometry);
}

TEST(EnvironmentTest, ObstacleMustBeStrictlyInside) {
  EXPECT_THROW(room(10, 10, {square(8, 8, 12, 9)}), InvalidGeometry);
  EXPECT_THROW(room(10, 10, {square(0, 2, 3, 3)}), InvalidGeometry);
  EXPECT_THROW(room(10, 10, {square(2, 2, 4, 4), square(3, 3, 5, 5)}), InvalidGeometry);
  EXPECT_THROW(room(10, 10, {square(2, 2, 6, 6), square(3, 3, 4, 4)}), InvalidGeometry);
  EXPECT_NO_THROW(room(10, 10, {square(2, 2, 4, 4), square(5, 5, 6, 6)}));
}

TEST(PointInFreeSpace, Examples) {
  const Environment empty = room(10, 10);
  EXPECT_TRUE(point_in_free_space(empty, {5, 5}));
  EXPECT_FALSE(point_in_free_space(empty, {11, 5}));
  const Environment holed = room(10, 10, {square(2, 2, 4, 4)});
  EXPECT_FALSE(point_in_free_space(holed, {3, 3}));
  EXPECT_FALSE(point_in_free_space(holed, {4, 3}));          // on obstacle edge
  EXPECT_FALSE(point_in_free_space(holed, {4 + 1e-10, 3}));  // within epsilon
  EXPECT_TRUE(point_in_free_space(holed, {4 + 1e-6, 3}));
  EXPECT_FALSE(point_in_free_space(holed, {0, 5}));
}

TEST(Visibility, ConvexRoomSeesEverything) {
  const Environment env = room(10, 10);
  const VisibilityPolygon vp = compute_visibility_polygon(env, {5, 5});
  EXPECT_NEAR(vp.area(), 100.0, 1e-9);
  EXPECT_EQ(vp.polygon().size(), 4u);
  EXPECT_EQ(vp.kernel(), (Point2{5, 5}));
}

TEST(Visibility, ConvexPolygonAnyInteriorPoint) {
  gen::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Environment env(SimplePolygon(gen::convex_polygon(rng, {0, 0}, 5.0, 5, 12)), {});
    const Point2 p = gen::free_point(rng, env, 0.01);
    EXPECT_NEAR(compute_visibility_polygon(env, p).area(), env.boundary().area(), 1e-9);
  }
}

TEST(Visibility, CentredObstacleMatchesRayFan) {
  const Environment env = room(10, 10, {square(4, 4, 6, 6)});
  const Point2 p{1, 5};
  const double exact = compute_visibility_polygon(env, p).area();
  // A 1 degree triangle fan loses about 0.23 m^2 at each shadow edge here
  // (75.55 vs 76), so the comparison uses a 0.1 degree fan.
  const double fan = oracle::ray_fan_area(env, p, 0.1, oracle::FanRule::triangles);
  EXPECT_NEAR(exact, fan, 0.005 * fan);
  // Closed form: the obstacle plus its shadow is the trapezoid
  // (4,4)-(10,2)-(10,8)-(4,6) of area 24.
  EXPECT_NEAR(exact, 76.0, 1e-9);
}

TEST(Visibility, KernelOutsideFreeSpaceThrows) {
  const Environment env = room(10, 10, {square(4, 4, 6, 6)});
  EXPECT_THROW(compute_visibility_polygon(env, {5, 5}), PointNotInFreeSpace);
  EXPECT_THROW(compute_visibility_polygon(env, {4, 5}), PointNotInFreeSpace);
  EXPECT_THROW(compute_visibility_polygon(env, {12, 5}), PointNotInFreeSpace);
}

TEST(Visibility, CollinearVerticesAreHandled) {
  // Kernel aligned with several obstacle edges and vertices.
  const Environment env = room(12, 12, {square(2, 2, 4, 4), square(6, 2, 8, 4), square(2, 6, 4, 8)});
  for (Point2 p : {Point2{1, 2}, Point2{1, 4}, Point2{5, 5}, Point2{9, 4}, Point2{5, 1}}) {
    const double exact = compute_visibility_polygon(env, p).area();
    const double fan = oracle::ray_fan_area(env, p, 0.05, oracle::FanRule::sectors);
    EXPECT_NEAR(exact, fan, 0.005 * fan) << p.x << "," << p.y;
  }
}

// The polygon stays inside free space and everything in it is seen from the kernel.
TEST(Visibility, PropertyContainedAndVisible) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Environment env = gen::random_environment(rng);
    const Point2 p = gen::free_point(rng, env);
    const VisibilityPolygon vp = compute_visibility_polygon(env, p);
    const auto [lo, hi] = env.bounding_box();
    int checked = 0;
    for (int i = 0; i < 100000 && checked < 100; ++i) {
      const Point2 q{gen::uniform(rng, lo.x, hi.x), gen::uniform(rng, lo.y, hi.y)};
      if (classify_point(vp.polygon(), q, 1e-6) != Containment::inside) continue;
      ++checked;
      EXPECT_TRUE(point_in_free_space(env, q));
      for (const Segment& s : env.segments()) EXPECT_FALSE(segments_intersect({p, q}, s));
    }
    EXPECT_EQ(checked, 100);
  }
}

TEST(Rotation, IdentityAndQuarterTurn) {
  const VisibilityPolygon vp({0, 0}, square(-1, -1, 1, 1));
  EXPECT_EQ(rotate_about_kernel(vp, 0.0), vp);
  const VisibilityPolygon r = rotate_about_kernel(vp, std::numbers::pi / 2);
  for (Point2 v : r.polygon().vertices()) {
    bool found = false;
    for (Point2 w : vp.polygon().vertices()) found = found || distance(v, w) < 1e-12;
    EXPECT_TRUE(found);
  }
}

TEST(Rotation, PropertyAreaAndInverse) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Point2 k{gen::uniform(rng, -10, 10), gen::uniform(rng, -10, 10)};
    const VisibilityPolygon vp(k, SimplePolygon(gen::star_polygon(rng, k, 0.5, 4.0, 10)));
    const double theta = gen::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const VisibilityPolygon r = rotate_about_kernel(vp, theta);
    EXPECT_NEAR(r.area(), vp.area(), 1e-9 * vp.area());
    EXPECT_EQ(r.kernel(), vp.kernel());
    const VisibilityPolygon back = rotate_about_kernel(r, 2.0 * std::numbers::pi - theta);
    for (std::size_t i = 0; i < vp.polygon().size(); ++i)
      EXPECT_LT(distance(back.polygon()[i], vp.polygon()[i]), 1e-9);
  }
}

TEST(DifferenceArea, Examples) {
  const SimplePolygon a = square(0, 0, 2, 2);
  EXPECT_EQ(difference_area(a, a), 0.0);
  EXPECT_NEAR(difference_area(a, square(0.5, 0.5, 1.5, 1.5)), 3.0, 1e-12);
  EXPECT_NEAR(difference_area(square(0.5, 0.5, 1.5, 1.5), a), 0.0, 1e-12);
  EXPECT_NEAR(difference_area(a, square(1, 0, 3, 2)), 2.0, 1e-12);  // shared edges
  EXPECT_NEAR(difference_area(a, square(2, 0, 4, 2)), 4.0, 1e-12);  // touching only
  EXPECT_NEAR(difference_area(a, square(5, 5, 6, 6)), 4.0, 1e-12);  // disjoint
}

TEST(DifferenceArea, MultiplePieces) {
  // A strip through the middle of a 3x3 square leaves two 3x1 pieces.
  const SimplePolygon a = square(0, 0, 3, 3);
  const SimplePolygon b = square(-1, 1, 4, 2);
  EXPECT_NEAR(difference_area(a, b), 6.0, 1e-12);
}

TEST(DifferenceArea, RandomConvexPairsMatchMonteCarlo) {
  gen::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = gen::convex_polygon(rng, {0, 0}, 2.0, 3, 10);
    const auto b = gen::convex_polygon(rng, {gen::uniform(rng, -1.5, 1.5), gen::uniform(rng, -1.5, 1.5)}, 2.0, 3, 10);
    const double exact = difference_area(SimplePolygon(a), SimplePolygon(b));
    const double mc = oracle::monte_carlo_difference(SimplePolygon(a).vertices(), SimplePolygon(b).vertices(),
                                                     1'000'000, 1000 + trial);
    EXPECT_NEAR(exact, mc, std::max(0.01 * mc, 0.01)) << "trial " << trial;
  }
}

TEST(DifferenceArea, PropertyComplementsIntersection) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const SimplePolygon a(gen::star_polygon(rng, {0, 0}, 0.5, 3.0, 9));
    const SimplePolygon b(gen::star_polygon(rng, {gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)}, 0.5, 3.0, 7));
    const double d = difference_area(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d + intersection_area(a, b), a.area(), 1e-6 * a.area());
  }
}

TEST(DifferenceArea, ZeroExactlyWhenNested) {
  const SimplePolygon outer = square(0, 0, 4, 4);
  const SimplePolygon inner = square(1, 1, 2, 2);
  EXPECT_EQ(difference_area(inner, outer), 0.0);
  EXPECT_GT(difference_area(outer, inner), 0.0);
  EXPECT_EQ(difference_area(outer, outer), 0.0);
  // Sharing a boundary edge still counts as contained.
  EXPECT_EQ(difference_area(square(0, 0, 2, 2), outer), 0.0);
}

TEST(RadialProfile, AgreesWithGeneralClipper) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = gen::star_polygon(rng, {0, 0}, 0.3, 5.0, std::uniform_int_distribution<int>(5, 30)(rng));
    const auto b = gen::star_polygon(rng, {0, 0}, 0.3, 5.0, std::uniform_int_distribution<int>(5, 30)(rng));
    const SimplePolygon pa(a, SimplePolygon::Check::basic);
    const SimplePolygon pb(b, SimplePolygon::Check::basic);
    const auto ra = RadialProfile::build(pa.vertices());
    const auto rb = RadialProfile::build(pb.vertices());
    ASSERT_TRUE(ra && rb);
    EXPECT_NEAR(ra->area(), pa.area(), 1e-9 * pa.area());
    EXPECT_NEAR(intersection_area(*ra, *rb), intersection_area(pa, pb), 1e-9 * pa.area());
  }
}

TEST(RadialProfile, IdenticalProfilesIntersectToExactArea) {
  gen::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const SimplePolygon p(gen::star_polygon(rng, {0, 0}, 0.3, 5.0, 17), SimplePolygon::Check::basic);
    const auto r = RadialProfile::build(p.vertices());
    ASSERT_TRUE(r);
    EXPECT_EQ(intersection_area(*r, *r), r->area());
  }
}

TEST(RadialProfile, RejectsNonStarOrExteriorOrigin) {
  EXPECT_FALSE(RadialProfile::build(square(1, 1, 2, 2).vertices()));
  EXPECT_FALSE(RadialProfile::build(square(0, -1, 1, 1).vertices()));  // origin on edge
  // A spiral-ish polygon that folds back around the origin.
  const std::vector<Point2> fold{{1, -1}, {3, 0}, {1, 1}, {-1, 1}, {-1, -1}, {2, -0.2}, {0.5, -0.5}};
  EXPECT_FALSE(RadialProfile::build(fold));
}

}  // namespace
}  // namespace eni
