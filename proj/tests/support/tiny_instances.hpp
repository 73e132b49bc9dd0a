#pragma once

#include <algorithm>
#include <optional>
#include <set>

#include "sbrsp/instance.hpp"

namespace sbrsp::testing {

struct TinySpec {
  int students = 6;
  int schools = 2;
  int buses = 1;
  int max_stops = 4;
  double area_km = 1.5;
  int nodes = 12;
  std::optional<int> capacity;
  std::optional<double> max_route_time_s;
  double sometimes_share = 0.0;
  double never_share = 0.0;
  double rider_share = 1.0;
};

// Synthetic instance cut down to at most `max_stops` candidate stops that
// still cover every student. Empty when the cover needs more stops.
inline std::optional<Instance> tiny_instance(const TinySpec& t, std::uint64_t seed) {
  GeneratorSpec g;
  g.students = t.students;
  g.schools = t.schools;
  g.buses = t.buses;
  g.bus_capacity = t.capacity;
  g.area_km = t.area_km;
  g.network_nodes = t.nodes;
  g.network_style = "grid";
  g.stop_density = 2.0;
  g.max_route_time_s = t.max_route_time_s;
  g.sometimes_share = t.sometimes_share;
  g.never_share = t.never_share;
  g.rider_share = t.rider_share;
  Instance inst = generate_synthetic(g, seed);

  // Greedy cover, then the stops most students can reach.
  std::vector<int> needs;
  for (int s = 0; s < static_cast<int>(inst.students.size()); ++s) {
    if (inst.students[s].mode != ModeGroup::never) needs.push_back(s);
  }
  std::set<int> chosen;
  std::set<int> uncovered(needs.begin(), needs.end());
  while (!uncovered.empty()) {
    std::vector<int> gain(inst.stops.size(), 0);
    for (int s : uncovered) {
      for (const auto& r : inst.catchments[s]) gain[r.stop] += 1;
    }
    const int best = static_cast<int>(std::max_element(gain.begin(), gain.end()) - gain.begin());
    if (gain[best] == 0) return std::nullopt;
    chosen.insert(best);
    for (auto it = uncovered.begin(); it != uncovered.end();) {
      bool hit = false;
      for (const auto& r : inst.catchments[*it]) hit = hit || r.stop == best;
      it = hit ? uncovered.erase(it) : std::next(it);
    }
  }
  if (static_cast<int>(chosen.size()) > t.max_stops) return std::nullopt;
  std::vector<int> reach(inst.stops.size(), 0);
  for (int s : needs) {
    for (const auto& r : inst.catchments[s]) reach[r.stop] += 1;
  }
  std::vector<int> order(inst.stops.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return reach[a] > reach[b]; });
  for (int i : order) {
    if (static_cast<int>(chosen.size()) >= t.max_stops || reach[i] == 0) break;
    chosen.insert(i);
  }
  std::vector<CandidateStop> kept;
  for (int i : chosen) kept.push_back(inst.stops[i]);
  inst.stops = kept;
  validate_instance(inst);
  return inst;
}

}  // namespace sbrsp::testing
