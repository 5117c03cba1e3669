#pragma once

// Simultaneous physical/virtual walking: path planning in the virtual
// environment, redirection controllers, resets and navigability statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "eni/errors.hpp"
#include "eni/geometry.hpp"
#include "eni/parallel.hpp"
#include "eni/trace.hpp"

namespace eni {

enum class Controller { none, s2c, apf, arc };

inline std::string_view to_string(Controller c) {
  switch (c) {
    case Controller::none: return "none";
    case Controller::s2c: return "s2c";
    case Controller::apf: return "apf";
    case Controller::arc: return "arc";
  }
  return "none";
}

inline Controller parse_controller(std::string_view name) {
  for (Controller c : {Controller::none, Controller::s2c, Controller::apf, Controller::arc})
    if (to_string(c) == name) return c;
  throw InvalidInput("unknown controller '" + std::string(name) + "'");
}

struct GainLimits {
  double translation_min = 0.86;
  double translation_max = 1.26;
  double rotation_min = 0.67;
  double rotation_max = 1.24;
  double curvature_radius_min = 7.5;  // meters

  void validate() const {
    if (!(translation_min > 0.0 && translation_min <= 1.0 && translation_max >= 1.0))
      throw InvalidInput("translation gain range must bracket 1");
    if (!(rotation_min > 0.0 && rotation_min <= 1.0 && rotation_max >= 1.0))
      throw InvalidInput("rotation gain range must bracket 1");
    if (!(curvature_radius_min > 0.0)) throw InvalidInput("minimum curvature radius must be positive");
  }
};

/// Per-step redirection. Virtual distance = translation * physical distance;
/// physical turn = virtual turn / rotation. Curvature bends the physical
/// path (1/m, positive = left) while the virtual path stays straight.
struct Gains {
  double translation = 1.0;
  double rotation = 1.0;
  double curvature = 0.0;

  friend bool operator==(const Gains&, const Gains&) = default;
};

struct PathPlan {
  std::vector<Point2> waypoints;
  double total_length = 0.0;

  friend bool operator==(const PathPlan&, const PathPlan&) = default;
};

struct PlannerParams {
  int iterations = 3000;
  double step = 0.5;
  double goal_bias = 0.1;
  double agent_radius = 0.25;
  double rewire_radius = 1.0;
  int shortcut_attempts = 100;
};

struct SimulationParams {
  double dt = 0.05;                                  // s
  double speed = 1.0;                                // m/s
  double turn_rate = std::numbers::pi / 2.0;         // rad/s
  double reset_clearance = 0.25;                     // m
  std::size_t max_steps = 1000000;
  GainLimits limits;
};

struct NavigabilityReport {
  double mean = 0.0;  // distance between resets, m
  double std = 0.0;
  std::size_t paths = 0;
  std::size_t resets = 0;
  std::size_t segments = 0;

  friend bool operator==(const NavigabilityReport&, const NavigabilityReport&) = default;
};

namespace detail {

inline double path_length(const std::vector<Point2>& w) {
  double len = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) len += distance(w[i - 1], w[i]);
  return len;
}

// True if the segment keeps at least `radius` from every environment edge
// and starts in free space (so it never leaves it).
inline bool segment_clear(const Environment& env, Point2 a, Point2 b, double radius) {
  if (!point_in_free_space(env, a)) return false;
  const Segment s{a, b};
  for (const Segment& e : env.segments())
    if (segment_segment_distance(s, e) < radius) return false;
  return true;
}

inline bool crosses_edge(const Environment& env, Point2 a, Point2 b) {
  const Segment s{a, b};
  for (const Segment& e : env.segments())
    if (segments_intersect(s, e)) return true;
  return false;
}

/// Distance from p along direction `angle` to the first environment edge.
inline double cast_ray(const Environment& env, Point2 p, double angle) {
  const Point2 u = unit_vector(angle);
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& e : env.segments()) {
    const Point2 d = e.b - e.a;
    const double den = cross(u, d);
    if (den == 0.0) continue;
    const double t = cross(e.a - p, d) / den;
    const double s = cross(e.a - p, u) / den;
    if (t >= 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

/// Sum over edges of (unit vector away from the edge) / distance^2, plus the
/// sum of the magnitudes for a relative zero test.
inline std::pair<Point2, double> repulsion(const Environment& env, Point2 p) {
  Point2 f{};
  double mag = 0.0;
  for (const Segment& e : env.segments()) {
    const Point2 away = p - closest_point_on_segment(e, p);
    const double d = norm(away);
    if (d <= 0.0) continue;
    f = f + (1.0 / (d * d * d)) * away;
    mag += 1.0 / (d * d);
  }
  return {f, mag};
}

inline Point2 free_centroid(const Environment& env) {
  auto moments = [](const SimplePolygon& poly, double& a, Point2& c) {
    const auto& v = poly.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2 p = v[i];
      const Point2 q = v[(i + 1) % v.size()];
      const double w = cross(p, q);
      a += w;
      c = c + w * (p + q);
    }
  };
  double a = 0.0;
  Point2 c{};
  moments(env.boundary(), a, c);
  for (const auto& ob : env.obstacles()) {
    double oa = 0.0;
    Point2 oc{};
    moments(ob, oa, oc);
    a -= oa;
    c = c - oc;
  }
  return (1.0 / (3.0 * a)) * c;
}

inline double steer_curvature(double offset, const GainLimits& lim) {
  return std::clamp(offset / (std::numbers::pi / 4.0), -1.0, 1.0) / lim.curvature_radius_min;
}

// Rotation gain that makes a virtual turn move the physical heading toward
// (or less away from) the steering target.
inline double steer_rotation(double virt_turn, double offset, const GainLimits& lim) {
  if (virt_turn == 0.0 || offset == 0.0) return 1.0;
  return (virt_turn > 0.0) == (offset > 0.0) ? lim.rotation_min : lim.rotation_max;
}

inline Gains clamp_gains(Gains g, const GainLimits& lim) {
  g.translation = std::clamp(g.translation, lim.translation_min, lim.translation_max);
  g.rotation = std::clamp(g.rotation, lim.rotation_min, lim.rotation_max);
  const double k = 1.0 / lim.curvature_radius_min;
  g.curvature = std::clamp(g.curvature, -k, k);
  return g;
}

}  // namespace detail

/// Heading along the physical repulsion gradient, or a half turn when the
/// surroundings cancel out.
inline double reset_to_gradient(const AgentState& state, const Environment& env_phys) {
  const auto [f, mag] = detail::repulsion(env_phys, state.phys_pos);
  if (norm(f) <= 1e-9 * mag) return wrap_angle(state.phys_heading + std::numbers::pi);
  return polar_angle(f);
}

/// Gains for one step. `virt_turn` is the signed virtual rotation about to
/// be made (0 while walking).
inline Gains apply_controller(Controller controller, const AgentState& state, const Environment& env_phys,
                              const Environment& env_virt, double virt_turn = 0.0, const GainLimits& lim = {}) {
  Gains g;
  switch (controller) {
    case Controller::none:
      return g;
    case Controller::s2c: {
      const Point2 to = detail::free_centroid(env_phys) - state.phys_pos;
      if (norm(to) <= 1e-9) return g;
      const double offset = angle_difference(state.phys_heading, polar_angle(to));
      if (virt_turn == 0.0) g.curvature = detail::steer_curvature(offset, lim);
      g.rotation = detail::steer_rotation(virt_turn, offset, lim);
      break;
    }
    case Controller::apf: {
      const auto [f, mag] = detail::repulsion(env_phys, state.phys_pos);
      if (norm(f) <= 1e-9 * mag) return g;
      const double offset = angle_difference(state.phys_heading, polar_angle(f));
      if (virt_turn == 0.0) g.curvature = detail::steer_curvature(offset, lim);
      g.rotation = detail::steer_rotation(virt_turn, offset, lim);
      break;
    }
    case Controller::arc: {
      // Ahead/left/right clearance of both worlds.
      auto rays = [](const Environment& env, Point2 p, double h) {
        return std::array<double, 3>{detail::cast_ray(env, p, h), detail::cast_ray(env, p, h + std::numbers::pi / 2),
                                     detail::cast_ray(env, p, h - std::numbers::pi / 2)};
      };
      const auto v = rays(env_virt, state.virt_pos, state.virt_heading);
      const auto p = rays(env_phys, state.phys_pos, state.phys_heading);
      g.translation = v[0] / p[0];
      const double m_left = p[1] - v[1];
      const double m_right = p[2] - v[2];
      const double delta = m_left - m_right;
      if (virt_turn == 0.0 && delta != 0.0)
        g.curvature = std::copysign(std::min(1.0, std::abs(delta)), delta) / lim.curvature_radius_min;
      if (virt_turn != 0.0) {
        const auto after_v = rays(env_virt, state.virt_pos, state.virt_heading + virt_turn);
        auto misalignment = [&](double gain) {
          const auto after_p = rays(env_phys, state.phys_pos, state.phys_heading + virt_turn / gain);
          double m = 0.0;
          for (int k = 0; k < 3; ++k) m += std::abs(after_p[k] - after_v[k]);
          return m;
        };
        double best = misalignment(1.0);
        for (double cand : {lim.rotation_min, lim.rotation_max}) {
          const double m = misalignment(cand);
          if (m < best) {
            best = m;
            g.rotation = cand;
          }
        }
      }
      break;
    }
  }
  return detail::clamp_gains(g, lim);
}

/// RRT* in the virtual environment followed by shortcut smoothing.
inline PathPlan plan_virtual_path(const Environment& env, Point2 start, Point2 goal, std::uint64_t seed,
                                  const PlannerParams& params = {}) {
  if (start == goal) return {{start}, 0.0};
  const double r = params.agent_radius;
  if (!point_in_free_space(env, start) || env.clearance(start) < r)
    throw PlanningFailed("start has too little clearance");
  if (!point_in_free_space(env, goal) || env.clearance(goal) < r) throw PlanningFailed("goal has too little clearance");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> way;

  if (detail::segment_clear(env, start, goal, r)) {
    way = {start, goal};
  } else {
    struct Node {
      Point2 p;
      int parent;
      double cost;
    };
    std::vector<Node> nodes{{start, -1, 0.0}};
    int goal_node = -1;
    const auto [lo, hi] = env.bounding_box();
    for (int it = 0; it < params.iterations; ++it) {
      const Point2 target = unit(rng) < params.goal_bias
                                ? goal
                                : Point2{lo.x + unit(rng) * (hi.x - lo.x), lo.y + unit(rng) * (hi.y - lo.y)};
      std::size_t nearest = 0;
      double nd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = distance(nodes[i].p, target);
        if (d < nd) {
          nd = d;
          nearest = i;
        }
      }
      if (nd <= 1e-12) continue;
      const Point2 from = nodes[nearest].p;
      const Point2 p = nd <= params.step ? target : from + (params.step / nd) * (target - from);
      if (env.clearance(p) < r || !point_in_free_space(env, p)) continue;
      if (!detail::segment_clear(env, from, p, r)) continue;

      std::vector<int> near;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (distance(nodes[i].p, p) <= params.rewire_radius) near.push_back(static_cast<int>(i));
      int parent = static_cast<int>(nearest);
      double cost = nodes[nearest].cost + distance(from, p);
      for (int i : near) {
        const double c = nodes[i].cost + distance(nodes[i].p, p);
        if (c < cost && detail::segment_clear(env, nodes[i].p, p, r)) {
          cost = c;
          parent = i;
        }
      }
      const int id = static_cast<int>(nodes.size());
      nodes.push_back({p, parent, cost});
      for (int i : near) {
        if (i == parent) continue;
        const double c = cost + distance(p, nodes[i].p);
        if (c < nodes[i].cost && detail::segment_clear(env, p, nodes[i].p, r)) {
          // Costs below i are refreshed lazily when the path is read back.
          nodes[i].parent = id;
          nodes[i].cost = c;
        }
      }
      if (distance(p, goal) <= params.step && p != goal && detail::segment_clear(env, p, goal, r)) {
        const double c = cost + distance(p, goal);
        if (goal_node < 0 || c < nodes[goal_node].cost) {
          nodes.push_back({goal, id, c});
          goal_node = static_cast<int>(nodes.size()) - 1;
        }
      } else if (p == goal && (goal_node < 0 || cost < nodes[goal_node].cost)) {
        goal_node = id;
      }
    }
    if (goal_node < 0) throw PlanningFailed("no path found within the iteration budget");
    for (int i = goal_node; i >= 0; i = nodes[i].parent) {
      way.push_back(nodes[i].p);
      if (way.size() > nodes.size()) throw PlanningFailed("planner tree has a cycle");
    }
    std::reverse(way.begin(), way.end());

    // Greedy: jump to the farthest waypoint in sight.
    std::vector<Point2> greedy{way.front()};
    for (std::size_t i = 0; i + 1 < way.size();) {
      std::size_t j = way.size() - 1;
      while (j > i + 1 && !detail::segment_clear(env, way[i], way[j], r)) --j;
      greedy.push_back(way[j]);
      i = j;
    }
    way = std::move(greedy);

    // Random shortcuts between points on the polyline.
    for (int a = 0; a < params.shortcut_attempts && way.size() > 2; ++a) {
      const double len = detail::path_length(way);
      double s0 = unit(rng) * len;
      double s1 = unit(rng) * len;
      if (s0 > s1) std::swap(s0, s1);
      auto locate = [&](double s, std::size_t& seg) {
        for (seg = 0; seg + 2 < way.size(); ++seg) {
          const double l = distance(way[seg], way[seg + 1]);
          if (s <= l) break;
          s -= l;
        }
        const double l = distance(way[seg], way[seg + 1]);
        return way[seg] + (l > 0.0 ? std::min(s / l, 1.0) : 0.0) * (way[seg + 1] - way[seg]);
      };
      std::size_t i0 = 0;
      std::size_t i1 = 0;
      const Point2 p0 = locate(s0, i0);
      const Point2 p1 = locate(s1, i1);
      if (i0 == i1) continue;
      if (!detail::segment_clear(env, p0, p1, r)) continue;
      std::vector<Point2> next(way.begin(), way.begin() + static_cast<std::ptrdiff_t>(i0) + 1);
      if (distance(next.back(), p0) > 1e-9) next.push_back(p0);
      if (distance(next.back(), p1) > 1e-9) next.push_back(p1);
      for (std::size_t k = i1 + 1; k < way.size(); ++k)
        if (distance(next.back(), way[k]) > 1e-9) next.push_back(way[k]);
      if (detail::path_length(next) < detail::path_length(way)) way = std::move(next);
    }
  }
  PathPlan plan{std::move(way), 0.0};
  plan.total_length = detail::path_length(plan.waypoints);
  return plan;
}

/// Walks `plan` in the virtual environment while the physical user follows
/// under the controller's gains, resetting near physical obstacles.
inline Trace simulate_path(const Environment& env_phys, const Environment& env_virt, const PathPlan& plan,
                           Controller controller, const AgentState& start, const SimulationParams& params = {}) {
  params.limits.validate();
  if (plan.waypoints.empty()) throw InvalidInput("plan has no waypoints");
  if (distance(plan.waypoints.front(), start.virt_pos) > 1e-9)
    throw InvalidInput("start state is not at the start of the plan");
  if (!point_in_free_space(env_phys, start.phys_pos)) throw PoseOutOfBounds("physical start outside free space");
  if (!point_in_free_space(env_virt, start.virt_pos)) throw PoseOutOfBounds("virtual start outside free space");

  Trace trace;
  AgentState s = start;
  trace.states.push_back(s);
  double since_reset = 0.0;
  std::size_t steps = 0;
  auto tick = [&] {
    if (++steps > params.max_steps) throw SimulationDiverged("walk did not finish within the step budget");
    trace.states.push_back(s);
  };
  const double max_turn = params.turn_rate * params.dt;
  const double max_step = params.speed * params.dt;

  std::size_t last_reset_state = std::numeric_limits<std::size_t>::max();
  auto reset = [&] {
    const std::size_t here = trace.states.size() - 1;
    double target = reset_to_gradient(s, env_phys);
    if (last_reset_state != std::numeric_limits<std::size_t>::max() && since_reset == 0.0) {
      // The gradient turn did not free the user; take the heading whose
      // first step gains the most clearance.
      double best = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < 72; ++k) {
        const double h = kTwoPi * k / 72.0;
        const Point2 q = s.phys_pos + max_step * unit_vector(h);
        if (!point_in_free_space(env_phys, q) || detail::crosses_edge(env_phys, s.phys_pos, q)) continue;
        const double c = env_phys.clearance(q);
        if (c > best) {
          best = c;
          target = h;
        }
      }
    }
    last_reset_state = here;
    trace.resets.push_back({here, s.phys_pos, s.virt_pos});
    trace.segments.push_back(since_reset);
    since_reset = 0.0;
    double remaining = angle_difference(s.phys_heading, target);
    do {
      const double turn = std::clamp(remaining, -max_turn, max_turn);
      s.phys_heading = wrap_angle(s.phys_heading + turn);
      remaining -= turn;
      tick();
    } while (std::abs(remaining) > 1e-12);
  };

  for (std::size_t w = 1; w < plan.waypoints.size(); ++w) {
    const Point2 goal = plan.waypoints[w];
    double left = distance(s.virt_pos, goal);
    if (left <= 1e-12) continue;

    // Face the next waypoint.
    double remaining = angle_difference(s.virt_heading, polar_angle(goal - s.virt_pos));
    while (std::abs(remaining) > 1e-12) {
      const double sign = remaining > 0.0 ? 1.0 : -1.0;
      const Gains g = apply_controller(controller, s, env_phys, env_virt, sign * max_turn, params.limits);
      const double turn = std::clamp(remaining, -g.rotation * max_turn, g.rotation * max_turn);
      s.virt_heading = wrap_angle(s.virt_heading + turn);
      s.phys_heading = wrap_angle(s.phys_heading + turn / g.rotation);
      remaining -= turn;
      tick();
    }

    // Walk it.
    while (left > 1e-12) {
      const Gains g = apply_controller(controller, s, env_phys, env_virt, 0.0, params.limits);
      const double dv = std::min(left, g.translation * max_step);
      const double dp = dv / g.translation;
      const double bend = g.curvature * dp;
      const Point2 next = s.phys_pos + dp * unit_vector(s.phys_heading + 0.5 * bend);
      const double c_now = env_phys.clearance(s.phys_pos);
      const double c_next = env_phys.clearance(next);
      const bool blocked = !point_in_free_space(env_phys, next) || detail::crosses_edge(env_phys, s.phys_pos, next);
      if (blocked || (c_next < params.reset_clearance && c_next < c_now)) {
        reset();
        continue;
      }
      s.phys_pos = next;
      s.phys_heading = wrap_angle(s.phys_heading + bend);
      s.virt_pos = s.virt_pos + dv * unit_vector(s.virt_heading);
      left -= dv;
      since_reset += dv;
      trace.virtual_distance += dv;
      tick();
    }
  }
  trace.segments.push_back(since_reset);
  return trace;
}

/// Pools distance-between-resets over traces.
inline NavigabilityReport navigability(const std::vector<Trace>& traces) {
  if (traces.empty()) throw InvalidInput("no traces to summarize");
  std::vector<double> all;
  NavigabilityReport r;
  r.paths = traces.size();
  for (const Trace& t : traces) {
    all.insert(all.end(), t.segments.begin(), t.segments.end());
    r.resets += t.resets.size();
  }
  r.segments = all.size();
  double sum = 0.0;
  for (double d : all) sum += d;
  r.mean = sum / static_cast<double>(all.size());
  double sq = 0.0;
  for (double d : all) sq += (d - r.mean) * (d - r.mean);
  r.std = std::sqrt(sq / static_cast<double>(all.size()));
  return r;
}

enum class StartMode { random, aligned };

struct SimulationRun {
  std::vector<PathPlan> plans;
  std::vector<Trace> traces;
  std::size_t failures = 0;
  NavigabilityReport report;
};

namespace detail {

inline Point2 random_free_point(const Environment& env, std::mt19937_64& rng, double clearance) {
  const auto [lo, hi] = env.bounding_box();
  std::uniform_real_distribution<double> ux(lo.x, hi.x);
  std::uniform_real_distribution<double> uy(lo.y, hi.y);
  for (int tries = 0; tries < 100000; ++tries) {
    const Point2 p{ux(rng), uy(rng)};
    if (point_in_free_space(env, p) && env.clearance(p) >= clearance) return p;
  }
  throw PlanningFailed("no free point with the required clearance");
}

}  // namespace detail

/// Plans and walks `paths` seeded virtual routes. Path k uses its own
/// generator seeded from (seed, k); failed plans are counted and skipped.
inline SimulationRun simulate_pair(const Environment& env_phys, const Environment& env_virt, std::size_t paths,
                                   Controller controller, std::uint64_t seed, StartMode start_mode = StartMode::random,
                                   const SimulationParams& sim = {}, const PlannerParams& planner = {}) {
  if (paths == 0) throw InvalidInput("path count must be positive");
  struct Slot {
    bool ok = false;
    PathPlan plan;
    Trace trace;
  };
  std::vector<Slot> slots(paths);
  const double min_sep = 0.25 * env_virt.diameter();
  parallel_for(paths, [&](std::size_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    try {
      Point2 a;
      Point2 b;
      for (int tries = 0;; ++tries) {
        if (tries > 1000) throw PlanningFailed("could not place separated endpoints");
        a = detail::random_free_point(env_virt, rng, planner.agent_radius);
        b = detail::random_free_point(env_virt, rng, planner.agent_radius);
        if (distance(a, b) >= min_sep) break;
      }
      PathPlan plan = plan_virtual_path(env_virt, a, b, rng(), planner);
      const double heading = plan.waypoints.size() > 1 ? polar_angle(plan.waypoints[1] - a) : 0.0;
      AgentState start{a, heading, a, heading};
      if (start_mode == StartMode::random) {
        start.phys_pos = detail::random_free_point(env_phys, rng, sim.reset_clearance + sim.speed * sim.dt);
        start.phys_heading = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
      } else if (!point_in_free_space(env_phys, a)) {
        throw PlanningFailed("aligned start is outside physical free space");
      }
      slots[k].trace = simulate_path(env_phys, env_virt, plan, controller, start, sim);
      slots[k].plan = std::move(plan);
      slots[k].ok = true;
    } catch (const PlanningFailed&) {
      slots[k].ok = false;
    }
  });
  SimulationRun run;
  for (Slot& s : slots) {
    if (!s.ok) {
      ++run.failures;
      continue;
    }
    run.plans.push_back(std::move(s.plan));
    run.traces.push_back(std::move(s.trace));
  }
  if (run.traces.empty()) throw PlanningFailed("every path failed to plan");
  run.report = navigability(run.traces);
  return run;
}

}  // namespace eni
