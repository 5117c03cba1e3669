#pragma once

// Command-line front end: compute, simulate and export-viz.
// Exit codes: 0 success, 1 runtime failure, 2 usage or file error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eni/errors.hpp"
#include "eni/io.hpp"
#include "eni/metric.hpp"
#include "eni/simulator.hpp"

namespace eni::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string subcommand;
  std::string pe;
  std::string ve;
  std::size_t samples = 500;
  std::size_t thetas = 10;
  std::uint64_t seed = 0;
  std::size_t paths = 50;
  std::string controller = "none";
  std::string start = "random";
  std::string result;
  std::string traces;
  std::string out;
};

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Runs `body`, mapping library errors onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

inline int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Environment pe = load_environment(cfg.pe);
    const Environment ve = load_environment(cfg.ve);
    const RotationSet thetas = RotationSet::uniform(cfg.thetas);
    const auto t0 = std::chrono::steady_clock::now();
    err << "sampling " << cfg.samples << " points per environment\n";
    SampleSet virt = sample_points(ve, cfg.samples);
    SampleSet phys = pe == ve ? virt : sample_points(pe, cfg.samples);
    err << "matching " << virt.size() << " virtual x " << phys.size() << " physical samples x " << thetas.size()
        << " rotations\n";
    const EniResult r = compute_eni(pe, ve, std::move(phys), std::move(virt), thetas);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.out.empty()) save_eni_result(cfg.out, r);
    out << "ENI " << format("mu=%.3f sigma=%.3f", r.mean, r.std) << " n=" << r.virt_samples.size()
        << " m=" << r.phys_samples.size() << " time_s=" << format("%.2f", secs) << "\n";
    return kExitOk;
  });
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Environment pe = load_environment(cfg.pe);
    const Environment ve = load_environment(cfg.ve);
    const Controller controller = parse_controller(cfg.controller);
    StartMode start = StartMode::random;
    if (cfg.start == "aligned") {
      start = StartMode::aligned;
    } else if (cfg.start != "random") {
      throw InvalidInput("start must be 'random' or 'aligned'");
    }
    err << "simulating " << cfg.paths << " paths with controller " << to_string(controller) << "\n";
    const SimulationFile f{pe, ve, controller, cfg.seed, cfg.paths,
                           simulate_pair(pe, ve, cfg.paths, controller, cfg.seed, start)};
    if (f.run.failures > 0) err << f.run.failures << " of " << cfg.paths << " paths failed to plan\n";
    if (!cfg.out.empty()) save_simulation(cfg.out, f);
    const auto& r = f.run.report;
    out << "NAV " << format("mean=%.3f std=%.3f", r.mean, r.std) << " paths=" << r.paths
        << " failures=" << f.run.failures << " resets=" << r.resets << "\n";
    return kExitOk;
  });
}

inline int cmd_export_viz(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EniResult r = load_eni_result(cfg.result);
    std::vector<Trace> traces;
    if (!cfg.traces.empty()) traces = load_simulation(cfg.traces).run.traces;
    export_viz_bundle(cfg.out, r, std::move(traces));
    out << cfg.out << "\n";
    return kExitOk;
  });
}

/// Parses arguments and dispatches to a subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Environment navigation incompatibility between a physical and a virtual environment", "eni"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* compute = app.add_subcommand("compute", "Compute the ENI score vector and its summary");
  compute->add_option("--pe", cfg.pe, "Physical environment file")->required();
  compute->add_option("--ve", cfg.ve, "Virtual environment file")->required();
  compute->add_option("--samples", cfg.samples, "Target sample count per environment")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{10}, std::size_t{100000}));
  compute->add_option("--thetas", cfg.thetas, "Number of equally spaced rotations")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{360}));
  compute->add_option("--out", cfg.out, "Result file");

  auto* simulate = app.add_subcommand("simulate", "Simulate seeded walks and report distance between resets");
  simulate->add_option("--pe", cfg.pe, "Physical environment file")->required();
  simulate->add_option("--ve", cfg.ve, "Virtual environment file")->required();
  simulate->add_option("--paths", cfg.paths, "Number of paths")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  simulate->add_option("--controller", cfg.controller, "none, s2c, apf or arc")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "s2c", "apf", "arc"}));
  simulate->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  simulate->add_option("--start", cfg.start, "Physical start: random or aligned with the virtual start")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "aligned"}));
  simulate->add_option("--out", cfg.out, "Simulation file");

  auto* viz = app.add_subcommand("export-viz", "Write a visualization bundle from a result file");
  viz->add_option("--result", cfg.result, "Result file")->required();
  viz->add_option("--traces", cfg.traces, "Simulation file whose traces are embedded");
  viz->add_option("--out", cfg.out, "Bundle file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.subcommand == "compute") return cmd_compute(cfg, out, err);
  if (cfg.subcommand == "simulate") return cmd_simulate(cfg, out, err);
  return cmd_export_viz(cfg, out, err);
}

}  // namespace eni::cli
