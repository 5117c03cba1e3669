#pragma once

// Text file formats: environments, ENI results, simulation runs and the
// visualization bundle. All are single JSON objects; result-like files carry
// "format_version": 1 and every reader rejects unknown fields.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eni/errors.hpp"
#include "eni/geometry.hpp"
#include "eni/metric.hpp"
#include "eni/sampling.hpp"
#include "eni/simulator.hpp"
#include "eni/trace.hpp"

namespace eni {

inline constexpr int kFormatVersion = 1;
inline constexpr std::size_t kHistogramBins = 20;

using Json = nlohmann::ordered_json;

struct Histogram {
  std::vector<double> edges;         // bins + 1 values over [0, max score]
  std::vector<std::size_t> counts;   // per bin
  std::vector<std::size_t> bin_of;   // per virtual sample

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct VizBundle {
  Environment env_phys;
  Environment env_virt;
  std::vector<Point2> phys_points;
  std::vector<Point2> virt_points;
  RotationSet thetas;
  std::vector<double> scores;
  std::vector<MatchRecord> matches;
  double mean = 0.0;
  double std = 0.0;
  Histogram histogram;
  std::vector<Trace> traces;

  friend bool operator==(const VizBundle&, const VizBundle&) = default;
};

struct SimulationFile {
  Environment env_phys;
  Environment env_virt;
  Controller controller = Controller::none;
  std::uint64_t seed = 0;
  std::size_t paths_requested = 0;
  SimulationRun run;
};

/// Equal-width bins over [0, max(x)]; the last bin is closed. With an
/// all-zero vector every sample lands in bin 0.
inline Histogram make_histogram(const std::vector<double>& x, std::size_t bins = kHistogramBins) {
  Histogram h;
  const double top = x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = top * static_cast<double>(k) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double v : x) {
    std::size_t b = 0;
    if (top > 0.0) b = std::min(bins - 1, static_cast<std::size_t>(std::floor(v / top * static_cast<double>(bins))));
    h.bin_of.push_back(b);
    ++h.counts[b];
  }
  return h;
}

inline VizBundle make_viz_bundle(const EniResult& r, std::vector<Trace> traces = {}) {
  return {r.env_phys, r.env_virt, r.phys_samples.points, r.virt_samples.points, r.thetas, r.x,
          r.matches,  r.mean,     r.std,                  make_histogram(r.x),    std::move(traces)};
}

namespace detail {

inline void check_keys(const Json& j, std::string_view what, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ParseError(std::string(what) + ": unknown field '" + key + "'");
  }
  for (std::string_view key : required)
    if (!j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + std::string(key) + "'");
}

inline void check_version(const Json& j, std::string_view kind) {
  if (!j.contains("format_version")) throw ParseError(std::string(kind) + ": missing format_version");
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kFormatVersion)
    throw UnsupportedVersion(std::string(kind) + ": unsupported format_version " + j["format_version"].dump());
  if (j.contains("kind") && j["kind"] != kind)
    throw ParseError("expected a " + std::string(kind) + " file, got " + j["kind"].dump());
}

inline double number(const Json& j) {
  if (!j.is_number()) throw ParseError("expected a number, got " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError("non-finite number");
  return v;
}

inline std::size_t index(const Json& j) {
  if (!j.is_number_unsigned()) throw ParseError("expected a non-negative integer, got " + j.dump());
  return j.get<std::size_t>();
}

inline Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

inline Point2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected an [x, y] pair");
  return {number(j[0]), number(j[1])};
}

inline Json points_json(const std::vector<Point2>& pts) {
  Json a = Json::array();
  for (Point2 p : pts) a.push_back(point_json(p));
  return a;
}

inline std::vector<Point2> points_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of points");
  std::vector<Point2> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

inline std::vector<double> numbers_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v));
  return out;
}

inline Json env_json(const Environment& env) {
  Json obstacles = Json::array();
  for (const auto& ob : env.obstacles()) obstacles.push_back(points_json(ob.vertices()));
  return Json{{"name", env.name()}, {"boundary", points_json(env.boundary().vertices())}, {"obstacles", obstacles}};
}

inline Environment env_from(const Json& j) {
  check_keys(j, "environment", {"boundary"}, {"name", "obstacles", "format_version"});
  if (j.contains("format_version")) check_version(j, "environment");
  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("environment: name must be a string");
    name = j["name"].get<std::string>();
  }
  try {
    SimplePolygon boundary(points_from(j["boundary"]));
    std::vector<SimplePolygon> obstacles;
    if (j.contains("obstacles")) {
      if (!j["obstacles"].is_array()) throw ParseError("environment: obstacles must be an array");
      for (const auto& ob : j["obstacles"]) obstacles.emplace_back(points_from(ob));
    }
    return Environment(std::move(boundary), std::move(obstacles), std::move(name));
  } catch (const InvalidGeometry& e) {
    throw InvariantViolation(e.what());
  } catch (const EmptyFreeSpace& e) {
    throw InvariantViolation(e.what());
  }
}

inline Json samples_json(const SampleSet& s) {
  Json vis = Json::array();
  for (const auto& vp : s.vis_polygons) vis.push_back(points_json(vp.polygon().vertices()));
  return Json{{"max_area", s.max_area_used}, {"points", points_json(s.points)}, {"vis_polygons", vis}};
}

inline SampleSet samples_from(const Json& j) {
  check_keys(j, "samples", {"max_area", "points", "vis_polygons"});
  SampleSet s;
  s.max_area_used = number(j["max_area"]);
  s.points = points_from(j["points"]);
  if (!j["vis_polygons"].is_array() || j["vis_polygons"].size() != s.points.size())
    throw InvariantViolation("samples: one visibility polygon per point required");
  try {
    for (std::size_t i = 0; i < s.points.size(); ++i)
      s.vis_polygons.emplace_back(s.points[i],
                                  SimplePolygon(points_from(j["vis_polygons"][i]), SimplePolygon::Check::basic));
  } catch (const InvalidGeometry& e) {
    throw InvariantViolation(std::string("samples: ") + e.what());
  }
  return s;
}

inline Json match_json(const MatchRecord& m) {
  return Json{{"virt_index", m.virt_index}, {"phys_index", m.phys_index}, {"theta_index", m.theta_index},
              {"score", m.score}};
}

inline MatchRecord match_from(const Json& j) {
  check_keys(j, "match", {"virt_index", "phys_index", "theta_index", "score"});
  return {index(j["virt_index"]), index(j["phys_index"]), index(j["theta_index"]), number(j["score"])};
}

inline RotationSet thetas_from(const Json& j) {
  try {
    return RotationSet(numbers_from(j));
  } catch (const InvalidInput& e) {
    throw InvariantViolation(e.what());
  }
}

inline Json trace_json(const Trace& t) {
  Json states = Json::array();
  for (const auto& s : t.states)
    states.push_back(Json::array({s.phys_pos.x, s.phys_pos.y, s.phys_heading, s.virt_pos.x, s.virt_pos.y, s.virt_heading}));
  Json resets = Json::array();
  for (const auto& r : t.resets)
    resets.push_back(Json{{"step", r.step}, {"phys", point_json(r.phys_pos)}, {"virt", point_json(r.virt_pos)}});
  return Json{{"states", states}, {"resets", resets}, {"segments", t.segments}, {"virtual_distance", t.virtual_distance}};
}

inline Trace trace_from(const Json& j) {
  check_keys(j, "trace", {"states", "resets", "segments", "virtual_distance"});
  Trace t;
  if (!j["states"].is_array()) throw ParseError("trace: states must be an array");
  for (const auto& s : j["states"]) {
    const auto v = numbers_from(s);
    if (v.size() != 6) throw ParseError("trace: a state has six numbers");
    t.states.push_back({{v[0], v[1]}, v[2], {v[3], v[4]}, v[5]});
  }
  if (!j["resets"].is_array()) throw ParseError("trace: resets must be an array");
  for (const auto& r : j["resets"]) {
    check_keys(r, "reset", {"step", "phys", "virt"});
    t.resets.push_back({index(r["step"]), point_from(r["phys"]), point_from(r["virt"])});
  }
  t.segments = numbers_from(j["segments"]);
  t.virtual_distance = number(j["virtual_distance"]);
  return t;
}

inline Json histogram_json(const Histogram& h) {
  return Json{{"bins", h.counts.size()}, {"edges", h.edges}, {"counts", h.counts}, {"bin_of", h.bin_of}};
}

inline Histogram histogram_from(const Json& j) {
  check_keys(j, "histogram", {"bins", "edges", "counts", "bin_of"});
  Histogram h;
  const std::size_t bins = index(j["bins"]);
  h.edges = numbers_from(j["edges"]);
  for (const auto& c : j["counts"]) h.counts.push_back(index(c));
  for (const auto& b : j["bin_of"]) h.bin_of.push_back(index(b));
  if (h.edges.size() != bins + 1 || h.counts.size() != bins)
    throw InvariantViolation("histogram: edge/count lengths do not match the bin count");
  return h;
}

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed file: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Reading helpers turn library type errors into ParseError.
template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

// Environments.

inline std::string environment_to_string(const Environment& env) { return detail::env_json(env).dump(2) + "\n"; }

inline Environment environment_from_string(const std::string& text) {
  return detail::guarded([&] { return detail::env_from(detail::parse_text(text)); });
}

inline Environment load_environment(const std::string& path) {
  return environment_from_string(detail::read_file(path));
}

inline void save_environment(const std::string& path, const Environment& env) {
  detail::write_file(path, environment_to_string(env));
}

// ENI results.

inline std::string eni_result_to_string(const EniResult& r) {
  Json matches = Json::array();
  for (const auto& m : r.matches) matches.push_back(detail::match_json(m));
  const Json j{{"format_version", kFormatVersion},
               {"kind", "eni_result"},
               {"env_phys", detail::env_json(r.env_phys)},
               {"env_virt", detail::env_json(r.env_virt)},
               {"thetas", r.thetas.angles()},
               {"phys_samples", detail::samples_json(r.phys_samples)},
               {"virt_samples", detail::samples_json(r.virt_samples)},
               {"x", r.x},
               {"matches", matches},
               {"mean", r.mean},
               {"std", r.std}};
  return j.dump(1) + "\n";
}

inline EniResult eni_result_from_string(const std::string& text) {
  return detail::guarded([&] {
    const Json j = detail::parse_text(text);
    detail::check_keys(j, "eni_result",
                       {"format_version", "kind", "env_phys", "env_virt", "thetas", "phys_samples", "virt_samples", "x",
                        "matches", "mean", "std"});
    detail::check_version(j, "eni_result");
    EniResult r{detail::env_from(j["env_phys"]),
                detail::env_from(j["env_virt"]),
                detail::samples_from(j["phys_samples"]),
                detail::samples_from(j["virt_samples"]),
                detail::thetas_from(j["thetas"]),
                detail::numbers_from(j["x"]),
                {},
                detail::number(j["mean"]),
                detail::number(j["std"])};
    if (!j["matches"].is_array()) throw ParseError("eni_result: matches must be an array");
    for (const auto& m : j["matches"]) r.matches.push_back(detail::match_from(m));
    const std::size_t n = r.virt_samples.size();
    if (r.x.size() != n || r.matches.size() != n)
      throw InvariantViolation("eni_result: score and match counts must equal the virtual sample count");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& m = r.matches[i];
      if (m.virt_index != i || m.phys_index >= r.phys_samples.size() || m.theta_index >= r.thetas.size())
        throw InvariantViolation("eni_result: match record out of range");
      if (m.score != r.x[i] || m.score < 0.0) throw InvariantViolation("eni_result: score does not match record");
    }
    if (n > 0) {
      const auto [mean, sd] = summarize(r.x);
      if (std::abs(mean - r.mean) > 1e-9 * std::max(1.0, std::abs(mean)) ||
          std::abs(sd - r.std) > 1e-9 * std::max(1.0, sd))
        throw InvariantViolation("eni_result: stored mean/std disagree with scores");
    }
    return r;
  });
}

inline void save_eni_result(const std::string& path, const EniResult& r) {
  detail::write_file(path, eni_result_to_string(r));
}

inline EniResult load_eni_result(const std::string& path) { return eni_result_from_string(detail::read_file(path)); }

// Simulation runs.

inline std::string simulation_to_string(const SimulationFile& f) {
  Json traces = Json::array();
  for (std::size_t k = 0; k < f.run.traces.size(); ++k) {
    Json t = detail::trace_json(f.run.traces[k]);
    t["plan"] = Json{{"waypoints", detail::points_json(f.run.plans[k].waypoints)},
                     {"total_length", f.run.plans[k].total_length}};
    traces.push_back(std::move(t));
  }
  const auto& r = f.run.report;
  const Json j{{"format_version", kFormatVersion},
               {"kind", "simulation"},
               {"env_phys", detail::env_json(f.env_phys)},
               {"env_virt", detail::env_json(f.env_virt)},
               {"controller", to_string(f.controller)},
               {"seed", f.seed},
               {"paths_requested", f.paths_requested},
               {"failures", f.run.failures},
               {"report",
                {{"mean", r.mean}, {"std", r.std}, {"paths", r.paths}, {"resets", r.resets}, {"segments", r.segments}}},
               {"traces", traces}};
  return j.dump(1) + "\n";
}

inline SimulationFile simulation_from_string(const std::string& text) {
  return detail::guarded([&] {
    const Json j = detail::parse_text(text);
    detail::check_keys(j, "simulation",
                       {"format_version", "kind", "env_phys", "env_virt", "controller", "seed", "paths_requested",
                        "failures", "report", "traces"});
    detail::check_version(j, "simulation");
    SimulationFile f;
    f.env_phys = detail::env_from(j["env_phys"]);
    f.env_virt = detail::env_from(j["env_virt"]);
    try {
      f.controller = parse_controller(j["controller"].get<std::string>());
    } catch (const InvalidInput& e) {
      throw ParseError(e.what());
    }
    f.seed = j["seed"].get<std::uint64_t>();
    f.paths_requested = detail::index(j["paths_requested"]);
    f.run.failures = detail::index(j["failures"]);
    const Json& rep = j["report"];
    detail::check_keys(rep, "report", {"mean", "std", "paths", "resets", "segments"});
    f.run.report = {detail::number(rep["mean"]), detail::number(rep["std"]), detail::index(rep["paths"]),
                    detail::index(rep["resets"]), detail::index(rep["segments"])};
    if (!j["traces"].is_array()) throw ParseError("simulation: traces must be an array");
    for (const auto& t : j["traces"]) {
      Json body = t;
      if (!body.contains("plan")) throw ParseError("trace: missing field 'plan'");
      const Json plan = body["plan"];
      body.erase("plan");
      detail::check_keys(plan, "plan", {"waypoints", "total_length"});
      f.run.plans.push_back({detail::points_from(plan["waypoints"]), detail::number(plan["total_length"])});
      f.run.traces.push_back(detail::trace_from(body));
    }
    if (f.run.traces.size() != f.run.report.paths) throw InvariantViolation("simulation: trace count mismatch");
    return f;
  });
}

inline void save_simulation(const std::string& path, const SimulationFile& f) {
  detail::write_file(path, simulation_to_string(f));
}

inline SimulationFile load_simulation(const std::string& path) {
  return simulation_from_string(detail::read_file(path));
}

// Visualization bundle.

inline std::string viz_bundle_to_string(const VizBundle& b) {
  Json matches = Json::array();
  for (const auto& m : b.matches) {
    Json e = detail::match_json(m);
    e["theta"] = b.thetas[m.theta_index];
    matches.push_back(std::move(e));
  }
  Json traces = Json::array();
  for (const auto& t : b.traces) traces.push_back(detail::trace_json(t));
  const Json j{{"format_version", kFormatVersion},
               {"kind", "viz_bundle"},
               {"env_phys", detail::env_json(b.env_phys)},
               {"env_virt", detail::env_json(b.env_virt)},
               {"phys_points", detail::points_json(b.phys_points)},
               {"virt_points", detail::points_json(b.virt_points)},
               {"thetas", b.thetas.angles()},
               {"scores", b.scores},
               {"matches", matches},
               {"mean", b.mean},
               {"std", b.std},
               {"histogram", detail::histogram_json(b.histogram)},
               {"traces", traces}};
  return j.dump(1) + "\n";
}

inline VizBundle viz_bundle_from_string(const std::string& text) {
  return detail::guarded([&] {
    const Json j = detail::parse_text(text);
    detail::check_keys(j, "viz_bundle",
                       {"format_version", "kind", "env_phys", "env_virt", "phys_points", "virt_points", "thetas",
                        "scores", "matches", "mean", "std", "histogram"},
                       {"traces"});
    detail::check_version(j, "viz_bundle");
    VizBundle b;
    b.env_phys = detail::env_from(j["env_phys"]);
    b.env_virt = detail::env_from(j["env_virt"]);
    b.phys_points = detail::points_from(j["phys_points"]);
    b.virt_points = detail::points_from(j["virt_points"]);
    b.thetas = detail::thetas_from(j["thetas"]);
    b.scores = detail::numbers_from(j["scores"]);
    for (const auto& m : j["matches"]) {
      Json e = m;
      e.erase("theta");
      b.matches.push_back(detail::match_from(e));
    }
    b.mean = detail::number(j["mean"]);
    b.std = detail::number(j["std"]);
    b.histogram = detail::histogram_from(j["histogram"]);
    if (j.contains("traces"))
      for (const auto& t : j["traces"]) b.traces.push_back(detail::trace_from(t));
    const std::size_t n = b.virt_points.size();
    if (b.scores.size() != n || b.matches.size() != n || b.histogram.bin_of.size() != n)
      throw InvariantViolation("viz_bundle: per-sample arrays must all have the virtual sample count");
    for (const auto& m : b.matches)
      if (m.phys_index >= b.phys_points.size() || m.theta_index >= b.thetas.size())
        throw InvariantViolation("viz_bundle: match record out of range");
    return b;
  });
}

inline void export_viz_bundle(const std::string& path, const EniResult& r, std::vector<Trace> traces = {}) {
  detail::write_file(path, viz_bundle_to_string(make_viz_bundle(r, std::move(traces))));
}

inline VizBundle load_viz_bundle(const std::string& path) { return viz_bundle_from_string(detail::read_file(path)); }

}  // namespace eni
