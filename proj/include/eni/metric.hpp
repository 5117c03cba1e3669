#pragma once

// Environment Navigation Incompatibility.
//
// For every virtual sample the metric finds the physical sample and the
// rotation (from a small discrete set) that leave the least virtual visible
// area uncovered. The per-sample minima form the score vector x.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "eni/boolean.hpp"
#include "eni/errors.hpp"
#include "eni/geometry.hpp"
#include "eni/parallel.hpp"
#include "eni/sampling.hpp"
#include "eni/trace.hpp"
#include "eni/visibility.hpp"

namespace eni {

class RotationSet {
 public:
  /// Ten angles, 36 degrees apart.
  RotationSet() : RotationSet(uniform(10)) {}

  explicit RotationSet(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.empty()) throw InvalidInput("rotation set is empty");
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      const double a = angles_[i];
      if (!std::isfinite(a) || a < 0.0 || a >= kTwoPi) throw InvalidInput("rotation angle outside [0, 2pi)");
      if (i > 0 && !(a > angles_[i - 1])) throw InvalidInput("rotation angles must be strictly increasing");
    }
  }

  static RotationSet uniform(std::size_t count) {
    if (count == 0) throw InvalidInput("rotation count must be positive");
    std::vector<double> a(count);
    for (std::size_t k = 0; k < count; ++k) a[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
    return RotationSet(std::move(a));
  }

  [[nodiscard]] const std::vector<double>& angles() const { return angles_; }
  [[nodiscard]] std::size_t size() const { return angles_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return angles_[i]; }

  friend bool operator==(const RotationSet&, const RotationSet&) = default;

 private:
  std::vector<double> angles_;
};

struct MatchRecord {
  std::size_t virt_index = 0;
  std::size_t phys_index = 0;
  std::size_t theta_index = 0;
  double score = 0.0;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct EniResult {
  Environment env_phys;
  Environment env_virt;
  SampleSet phys_samples;
  SampleSet virt_samples;
  RotationSet thetas;
  std::vector<double> x;
  std::vector<MatchRecord> matches;
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const EniResult&, const EniResult&) = default;
};

/// Visibility polygon moved so its kernel is the origin, with the
/// quantities phi needs cached.
class KernelPolygon {
 public:
  KernelPolygon() = default;

  explicit KernelPolygon(const VisibilityPolygon& vp, double theta = 0.0) {
    std::vector<Point2> rel;
    rel.reserve(vp.polygon().size());
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (Point2 v : vp.polygon().vertices()) {
      const Point2 d = v - vp.kernel();
      rel.push_back(theta == 0.0 ? d : Point2{c * d.x - s * d.y, s * d.x + c * d.y});
    }
    poly_ = SimplePolygon(std::move(rel), SimplePolygon::Check::basic);
    profile_ = RadialProfile::build(poly_.vertices());
    area_ = profile_ ? profile_->area() : poly_.area();
    perimeter_ = poly_.perimeter();
  }

  [[nodiscard]] const SimplePolygon& polygon() const { return poly_; }
  [[nodiscard]] double area() const { return area_; }
  [[nodiscard]] double perimeter() const { return perimeter_; }

  /// Area of this polygon not covered by `other`.
  [[nodiscard]] double uncovered_by(const KernelPolygon& other) const {
    const double inter = (profile_ && other.profile_) ? intersection_area(*profile_, *other.profile_)
                                                      : intersection_area(poly_, other.poly_);
    return snap_difference(std::max(area_ - inter, 0.0), perimeter_);
  }

 private:
  SimplePolygon poly_;
  std::optional<RadialProfile> profile_;
  double area_ = 0.0;
  double perimeter_ = 0.0;
};

/// Virtual visible area that the physical surroundings cannot cover, with
/// both kernels placed at the origin.
inline double phi(const VisibilityPolygon& virt, const VisibilityPolygon& phys) {
  return KernelPolygon(virt).uncovered_by(KernelPolygon(phys));
}

namespace detail {

// First index whose value is within a relative 1e-9 of the minimum.
inline std::size_t first_near_min(const double* values, std::size_t count) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) lo = std::min(lo, values[i]);
  const double tol = 1e-9 * std::max(1.0, std::abs(lo));
  for (std::size_t i = 0; i < count; ++i)
    if (values[i] <= lo + tol) return i;
  return 0;
}

inline std::pair<double, std::size_t> best_over(const KernelPolygon& virt, const std::vector<KernelPolygon>& rotated,
                                                std::vector<double>& scratch) {
  scratch.resize(rotated.size());
  for (std::size_t t = 0; t < rotated.size(); ++t) scratch[t] = virt.uncovered_by(rotated[t]);
  const std::size_t k = first_near_min(scratch.data(), scratch.size());
  return {scratch[k], k};
}

inline std::vector<KernelPolygon> rotations_of(const VisibilityPolygon& vp, const RotationSet& thetas) {
  std::vector<KernelPolygon> out;
  out.reserve(thetas.size());
  for (double t : thetas.angles()) out.emplace_back(vp, t);
  return out;
}

}  // namespace detail

/// Minimum of phi over the rotations of `phys`; near-ties go to the lowest
/// rotation index.
inline std::pair<double, std::size_t> phi_best_rotation(const VisibilityPolygon& virt, const VisibilityPolygon& phys,
                                                        const RotationSet& thetas = {}) {
  std::vector<double> scratch;
  return detail::best_over(KernelPolygon(virt), detail::rotations_of(phys, thetas), scratch);
}

/// Mean and population standard deviation.
inline std::pair<double, double> summarize(const std::vector<double>& x) {
  if (x.empty()) throw InvalidInput("cannot summarize an empty score vector");
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double sq = 0.0;
  for (double v : x) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(x.size()))};
}

/// Exhaustive matching of every virtual sample against every physical
/// sample and rotation.
inline EniResult compute_eni(const Environment& env_phys, const Environment& env_virt, SampleSet phys,
                             SampleSet virt, const RotationSet& thetas = {}) {
  if (phys.size() == 0 || virt.size() == 0) throw InvalidInput("sample sets must be non-empty");
  const std::size_t n = virt.size();
  const std::size_t m = phys.size();

  std::vector<std::vector<KernelPolygon>> phys_rot(m);
  parallel_for(m, [&](std::size_t j) { phys_rot[j] = detail::rotations_of(phys.vis_polygons[j], thetas); });

  std::vector<MatchRecord> matches(n);
  parallel_for(n, [&](std::size_t i) {
    const KernelPolygon v(virt.vis_polygons[i]);
    std::vector<double> scratch;
    std::vector<double> best(m);
    std::vector<std::size_t> best_theta(m);
    for (std::size_t j = 0; j < m; ++j) std::tie(best[j], best_theta[j]) = detail::best_over(v, phys_rot[j], scratch);
    const std::size_t j = detail::first_near_min(best.data(), m);
    matches[i] = {i, j, best_theta[j], best[j]};
  });

  EniResult out{env_phys, env_virt, std::move(phys), std::move(virt), thetas, {}, std::move(matches), 0.0, 0.0};
  out.x.reserve(n);
  for (const auto& r : out.matches) out.x.push_back(r.score);
  std::tie(out.mean, out.std) = summarize(out.x);
  return out;
}

/// Samples both environments (once if they are equal) and computes the
/// metric.
inline EniResult compute_eni(const Environment& env_phys, const Environment& env_virt, std::size_t target_count,
                             const RotationSet& thetas = {}) {
  SampleSet virt = sample_points(env_virt, target_count);
  SampleSet phys = env_phys == env_virt ? virt : sample_points(env_phys, target_count);
  return compute_eni(env_phys, env_virt, std::move(phys), std::move(virt), thetas);
}

struct PathEniOptions {
  enum class Heading { actual, best };
  Heading heading = Heading::actual;
  RotationSet thetas;       // used with Heading::best
  std::size_t stride = 1;   // score every stride-th pose (the last pose is always scored)
};

/// Per-pose phi along a walk. By default the physical polygon is turned by
/// the actual heading offset between the two worlds.
inline std::vector<double> path_eni(const Trace& trace, const Environment& env_phys, const Environment& env_virt,
                                    const PathEniOptions& opts = {}) {
  if (trace.states.empty()) throw InvalidInput("trace has no poses");
  if (opts.stride == 0) throw InvalidInput("stride must be positive");
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < trace.states.size(); i += opts.stride) picks.push_back(i);
  if (picks.back() != trace.states.size() - 1) picks.push_back(trace.states.size() - 1);
  for (std::size_t i : picks) {
    const AgentState& s = trace.states[i];
    if (!point_in_free_space(env_phys, s.phys_pos)) throw PoseOutOfBounds("physical pose outside free space");
    if (!point_in_free_space(env_virt, s.virt_pos)) throw PoseOutOfBounds("virtual pose outside free space");
  }
  std::vector<double> out(picks.size());
  parallel_for(picks.size(), [&](std::size_t k) {
    const AgentState& s = trace.states[picks[k]];
    const VisibilityPolygon pv = compute_visibility_polygon(env_phys, s.phys_pos);
    const VisibilityPolygon vv = compute_visibility_polygon(env_virt, s.virt_pos);
    if (opts.heading == PathEniOptions::Heading::best) {
      out[k] = phi_best_rotation(vv, pv, opts.thetas).first;
    } else {
      const double offset = wrap_angle(s.virt_heading - s.phys_heading);
      out[k] = KernelPolygon(vv).uncovered_by(KernelPolygon(pv, offset));
    }
  });
  return out;
}

}  // namespace eni
