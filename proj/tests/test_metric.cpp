#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eni/metric.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace eni;

namespace {

constexpr double kPi = std::numbers::pi;

Environment rect_room(double w, double h) { return Environment(SimplePolygon(gen::rectangle(0, 0, w, h)), {}); }

// Visibility polygon of an empty rectangle centred on the kernel.
VisibilityPolygon centred_rect(double w, double h, Point2 k = {0, 0}) {
  return {k, SimplePolygon(gen::rectangle(k.x - w / 2, k.y - h / 2, k.x + w / 2, k.y + h / 2))};
}

std::vector<Point2> relative(const VisibilityPolygon& vp, double theta) {
  std::vector<Point2> out;
  for (Point2 v : vp.polygon().vertices()) out.push_back(rotate(v - vp.kernel(), theta));
  return out;
}

Environment moved(const Environment& env, double angle, Point2 shift) {
  auto move = [&](const SimplePolygon& p) {
    std::vector<Point2> v;
    for (Point2 q : p.vertices()) v.push_back(rotate(q, angle) + shift);
    return SimplePolygon(v);
  };
  std::vector<SimplePolygon> obs;
  for (const auto& o : env.obstacles()) obs.push_back(move(o));
  return Environment(move(env.boundary()), obs);
}

}  // namespace

TEST(Phi, IdenticalPolygonsScoreZero) {
  const VisibilityPolygon a = centred_rect(3, 2, {7, -1});
  const VisibilityPolygon b = centred_rect(3, 2, {-4, 9});
  EXPECT_EQ(phi(a, a), 0.0);
  EXPECT_EQ(phi(a, b), 0.0);
}

TEST(Phi, LargerVirtualLeavesRing) {
  EXPECT_NEAR(phi(centred_rect(2, 2, {5, 5}), centred_rect(1, 1, {1, 1})), 3.0, 1e-12);
}

TEST(Phi, ContainedVirtualScoresZero) {
  EXPECT_EQ(phi(centred_rect(1, 1, {5, 5}), centred_rect(2, 2, {1, 1})), 0.0);
}

TEST(Phi, MatchesGeneralClipperOnRealRooms) {
  gen::Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    const Environment ea = gen::random_environment(rng);
    const Environment eb = gen::random_environment(rng);
    const auto va = compute_visibility_polygon(ea, gen::free_point(rng, ea, 0.05));
    const auto vb = compute_visibility_polygon(eb, gen::free_point(rng, eb, 0.05));
    const double expected =
        difference_area(SimplePolygon(relative(va, 0)), SimplePolygon(relative(vb, 0), SimplePolygon::Check::basic));
    EXPECT_NEAR(phi(va, vb), expected, 1e-7 * std::max(1.0, expected));
  }
}

TEST(PhiBestRotation, SymmetricPhysicalPolygonTiesToFirstAngle) {
  std::vector<Point2> deca;
  for (int i = 0; i < 10; ++i) deca.push_back(3.0 * unit_vector(2 * kPi * i / 10));
  const VisibilityPolygon phys({0, 0}, SimplePolygon(deca));
  const VisibilityPolygon virt = centred_rect(5, 2);
  std::vector<double> per;
  for (double t : RotationSet().angles()) per.push_back(phi(virt, rotate_about_kernel(phys, t)));
  for (double s : per) EXPECT_NEAR(s, per[0], 1e-6);
  const auto [score, index] = phi_best_rotation(virt, phys);
  EXPECT_EQ(index, 0u);
  EXPECT_NEAR(score, per[0], 1e-6);
}

TEST(PhiBestRotation, IdenticalSquares) {
  const auto [score, index] = phi_best_rotation(centred_rect(2, 2), centred_rect(2, 2));
  EXPECT_EQ(score, 0.0);
  EXPECT_EQ(index, 0u);
}

TEST(PhiBestRotation, CrossedRectanglesAgainstRaster) {
  const VisibilityPolygon virt = centred_rect(2, 1);
  const VisibilityPolygon phys = centred_rect(1, 2);
  const RotationSet thetas;
  double oracle = 1e9;
  for (double t : thetas.angles())
    oracle = std::min(oracle, oracle::raster_difference(relative(virt, 0), relative(phys, t), 2000));
  const auto [score, index] = phi_best_rotation(virt, phys, thetas);
  EXPECT_NEAR(score, oracle, 0.01 * 2.0);
  // 72 and 108 degrees are equally good by symmetry; the lower index wins.
  EXPECT_EQ(index, 2u);
}

TEST(RotationSetTest, DefaultIsTenSteps) {
  const RotationSet r;
  ASSERT_EQ(r.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(r[k], k * 36.0 * kPi / 180.0, 1e-15);
  EXPECT_THROW(RotationSet({0.0, 0.0}), InvalidInput);
  EXPECT_THROW(RotationSet({0.0, 7.0}), InvalidInput);
}

TEST(Summarize, Examples) {
  EXPECT_EQ(summarize({0, 0, 0}), std::make_pair(0.0, 0.0));
  const auto [m, s] = summarize({1, 2, 3});
  EXPECT_DOUBLE_EQ(m, 2.0);
  EXPECT_NEAR(s, std::sqrt(2.0 / 3.0), 1e-15);
  const auto [mc, sc] = summarize({4.25, 4.25, 4.25, 4.25});
  EXPECT_EQ(mc, 4.25);
  EXPECT_EQ(sc, 0.0);
  EXPECT_THROW(summarize({}), InvalidInput);
}

TEST(ComputeEni, SelfPairIsExactlyZero) {
  const Environment env(SimplePolygon(gen::rectangle(0, 0, 12, 8)),
                        {SimplePolygon(gen::rectangle(3, 3, 5, 4)), SimplePolygon(gen::rectangle(8, 2, 9, 6))});
  const EniResult r = compute_eni(env, env, 100);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.std, 0.0);
}

TEST(ComputeEni, SmallVirtualFitsLargePhysical) {
  const EniResult r = compute_eni(rect_room(20, 20), rect_room(5, 5), 60);
  EXPECT_EQ(r.mean, 0.0);
  // Independent containment check of every pairing.
  for (const auto& mr : r.matches) {
    const auto& v = r.virt_samples.vis_polygons[mr.virt_index];
    const auto& p = r.phys_samples.vis_polygons[mr.phys_index];
    const auto vr = relative(v, 0);
    const auto pr = relative(p, r.thetas[mr.theta_index]);
    EXPECT_LT(oracle::monte_carlo_difference(vr, pr, 20000, 1), 1e-9);
  }
}

TEST(ComputeEni, LargeVirtualCannotFitSmallPhysical) {
  const EniResult r = compute_eni(rect_room(5, 5), rect_room(20, 20), 60);
  EXPECT_GT(r.mean, 0.0);
  EXPECT_GT(*std::max_element(r.x.begin(), r.x.end()), 400.0 - 25.0 - 1e-6);
}

TEST(ComputeEni, ResultInvariants) {
  gen::Rng rng(21);
  const Environment pe = gen::random_environment(rng);
  const Environment ve = gen::random_environment(rng);
  const EniResult r = compute_eni(pe, ve, 30);
  ASSERT_EQ(r.x.size(), r.virt_samples.size());
  ASSERT_EQ(r.matches.size(), r.x.size());
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    EXPECT_EQ(r.matches[i].virt_index, i);
    EXPECT_EQ(r.x[i], r.matches[i].score);
    EXPECT_GE(r.x[i], 0.0);
    EXPECT_LT(r.matches[i].phys_index, r.phys_samples.size());
    EXPECT_LT(r.matches[i].theta_index, r.thetas.size());
  }
  const auto [m, s] = summarize(r.x);
  EXPECT_EQ(m, r.mean);
  EXPECT_EQ(s, r.std);
}

TEST(ComputeEni, MatchesAreTrueMinimaByGeneralClipper) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const Environment pe = gen::random_environment(rng);
    const Environment ve = gen::random_environment(rng);
    const EniResult r = compute_eni(pe, ve, 20);
    for (const auto& mr : r.matches) {
      const auto& v = r.virt_samples.vis_polygons[mr.virt_index];
      const SimplePolygon vr(relative(v, 0), SimplePolygon::Check::basic);
      double best = 1e300;
      for (std::size_t j = 0; j < r.phys_samples.size(); ++j)
        for (double t : r.thetas.angles()) {
          const SimplePolygon pr(relative(r.phys_samples.vis_polygons[j], t), SimplePolygon::Check::basic);
          best = std::min(best, difference_area(vr, pr));
        }
      EXPECT_NEAR(mr.score, best, 1e-7 * std::max(1.0, best));
    }
  }
}

TEST(ComputeEni, Deterministic) {
  gen::Rng rng(4);
  const Environment pe = gen::random_environment(rng);
  const Environment ve = gen::random_environment(rng);
  EXPECT_TRUE(compute_eni(pe, ve, 40) == compute_eni(pe, ve, 40));
}

TEST(ComputeEni, RigidMotionInvariance) {
  gen::Rng rng(14);
  const Environment pe = gen::random_environment(rng, 3);
  const Environment ve = gen::random_environment(rng, 3);
  const EniResult base = compute_eni(pe, ve, 50);
  const EniResult turned = compute_eni(moved(pe, 3 * 36.0 * kPi / 180.0, {12, -7}),
                                       moved(ve, 36.0 * kPi / 180.0, {-3, 40}), 50);
  ASSERT_EQ(base.x.size(), turned.x.size());
  std::vector<double> a = base.x;
  std::vector<double> b = turned.x;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
  EXPECT_NEAR(base.mean, turned.mean, 1e-6);
  EXPECT_NEAR(base.std, turned.std, 1e-6);
}

TEST(ComputeEni, AddingObstacleNeverGrowsVisibility) {
  gen::Rng rng(30);
  const Environment open = rect_room(15, 15);
  const Environment cluttered(open.boundary(), {SimplePolygon(gen::rectangle(6, 6, 9, 8))});
  for (int k = 0; k < 100; ++k) {
    const Point2 p = gen::free_point(rng, cluttered, 0.01);
    EXPECT_LE(compute_visibility_polygon(cluttered, p).area(), compute_visibility_polygon(open, p).area() + 1e-9);
  }
}

TEST(PathEni, IdenticalWorldsIdentityWalk) {
  const Environment env(SimplePolygon(gen::rectangle(0, 0, 10, 10)), {SimplePolygon(gen::rectangle(4, 4, 5, 6))});
  Trace t;
  for (int i = 0; i < 20; ++i) {
    const Point2 p{1 + 0.4 * i, 2};
    t.states.push_back({p, 0.3 * i, p, 0.3 * i});
  }
  for (double s : path_eni(t, env, env)) EXPECT_EQ(s, 0.0);
}

TEST(PathEni, OffsetWalkIsFiniteAndNonNegative) {
  const Environment env = rect_room(10, 10);
  Trace t;
  for (int i = 0; i < 10; ++i) t.states.push_back({{1 + 0.2 * i, 1}, 0.5, {5, 1 + 0.8 * i}, 1.5});
  const auto s = path_eni(t, env, env);
  ASSERT_EQ(s.size(), 10u);
  for (double v : s) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  EXPECT_GT(s[0], 0.0);
}

TEST(PathEni, HeadingOffsetRotatesPhysicalView) {
  // A 4x2 physical corridor seen from its centre covers a 2x4 virtual one
  // only after a quarter turn.
  const Environment pe = rect_room(4, 2);
  const Environment ve = rect_room(2, 4);
  Trace t;
  t.states.push_back({{2, 1}, 0.0, {1, 2}, kPi / 2});
  t.states.push_back({{2, 1}, 0.0, {1, 2}, 0.0});
  const auto s = path_eni(t, pe, ve);
  EXPECT_NEAR(s[0], 0.0, 1e-9);
  EXPECT_NEAR(s[1], 4.0, 1e-9);
  PathEniOptions best;
  best.heading = PathEniOptions::Heading::best;
  const double b = path_eni(t, pe, ve, best)[1];
  EXPECT_LT(b, s[1]);
  EXPECT_GE(b, 0.0);
}

TEST(PathEni, StrideKeepsLastPose) {
  const Environment env = rect_room(10, 10);
  Trace t;
  for (int i = 0; i < 8; ++i) t.states.push_back({{1.0 + i, 1}, 0, {1.0 + i, 1}, 0});
  PathEniOptions o;
  o.stride = 3;
  EXPECT_EQ(path_eni(t, env, env, o).size(), 4u);
}

TEST(PathEni, PoseOutsideFreeSpaceThrows) {
  const Environment env = rect_room(10, 10);
  Trace t;
  t.states.push_back({{11, 1}, 0, {1, 1}, 0});
  EXPECT_THROW(path_eni(t, env, env), PoseOutOfBounds);
  Trace empty;
  EXPECT_THROW(path_eni(empty, env, env), InvalidInput);
}
