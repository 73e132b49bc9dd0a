#pragma once

#include <vector>

#include "sbrsp/instance.hpp"

namespace sbrsp::testing {

// Students on the x axis (metres) beside one straight two-way road from
// x = -100 to x = 300, one school at x = 250 and a stop under each student.
inline Instance line_instance(const std::vector<double>& xs, int buses, int capacity) {
  std::vector<NetworkNode> nodes = {{1, {-100.0, 0.0}}, {2, {300.0, 0.0}}};
  std::vector<Road> roads = {{1, 2, 400.0, 10.0, std::nullopt, false}};
  Instance inst;
  inst.name = "line";
  inst.network = RoadNetwork(nodes, roads);
  School school;
  school.id = 1;
  school.name = "School";
  school.position = {250.0, 0.0};
  inst.schools.push_back(school);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Student s;
    s.id = static_cast<Id>(i + 1);
    s.position = {xs[i], 0.0};
    s.school_id = 1;
    inst.students.push_back(s);
    inst.stops.push_back({static_cast<Id>(100 + i), {xs[i], 0.0}, {}});
  }
  for (int k = 0; k < buses; ++k) inst.buses.push_back({k + 1, capacity, std::nullopt});
  validate_instance(inst);
  return inst;
}

}  // namespace sbrsp::testing
