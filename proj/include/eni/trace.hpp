#pragma once

// Simultaneous physical/virtual walk records.

#include <cstddef>
#include <vector>

#include "eni/geometry.hpp"

namespace eni {

struct AgentState {
  Point2 phys_pos;
  double phys_heading = 0.0;
  Point2 virt_pos;
  double virt_heading = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct ResetEvent {
  std::size_t step = 0;  // index into Trace::states where the reset began
  Point2 phys_pos;
  Point2 virt_pos;

  friend bool operator==(const ResetEvent&, const ResetEvent&) = default;
};

struct Trace {
  std::vector<AgentState> states;  // one per timestep, including the start
  std::vector<ResetEvent> resets;
  std::vector<double> segments;  // virtual distance between resets, then the tail
  double virtual_distance = 0.0;

  friend bool operator==(const Trace&, const Trace&) = default;
};

}  // namespace eni
