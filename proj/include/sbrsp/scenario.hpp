#pragma once

#include <vector>

#include "sbrsp/instance.hpp"
#include "sbrsp/travel_matrix.hpp"

namespace sbrsp {

// One routing job: the instance, the students who ride, and the bus travel
// times in force (free-flow or congested).
struct Scenario {
  const Instance* instance = nullptr;
  std::vector<int> riders;        // instance student indices, ascending
  std::vector<double> arc_times;  // per network arc
  TravelTimeMatrix matrix;        // every candidate stop, then every school

  const Instance& inst() const { return *instance; }
};

// Builds the travel matrix. Empty `arc_times` means free-flow.
Scenario make_scenario(const Instance& inst, std::vector<int> riders, std::vector<double> arc_times = {});

}  // namespace sbrsp
