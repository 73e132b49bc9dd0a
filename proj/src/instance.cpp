#include "sbrsp/instance.hpp"

#include <set>
#include <string>

#include "sbrsp/error.hpp"

namespace sbrsp {

std::string_view mode_group_name(ModeGroup g) {
  switch (g) {
    case ModeGroup::always: return "always";
    case ModeGroup::sometimes: return "sometimes";
    case ModeGroup::never: return "never";
  }
  return "always";
}

ModeGroup parse_mode_group(std::string_view s) {
  if (s == "always") return ModeGroup::always;
  if (s == "sometimes") return ModeGroup::sometimes;
  if (s == "never") return ModeGroup::never;
  throw Error(ErrorKind::validation, "unknown mode group '" + std::string(s) + "'");
}

std::vector<int> Instance::school_counts(const std::vector<int>& riders) const {
  std::vector<int> counts(schools.size(), 0);
  for (int s : riders) counts[students[s].school] += 1;
  return counts;
}

std::vector<int> Instance::status_quo_riders() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < students.size(); ++i) {
    const auto& s = students[i];
    if (s.mode == ModeGroup::always || (s.mode == ModeGroup::sometimes && s.rides_bus)) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

int Instance::total_capacity() const {
  int total = 0;
  for (const auto& b : buses) total += b.capacity;
  return total;
}

double Instance::arc_capacity_vph(int arc) const {
  const Road& road = network.roads()[network.arcs()[arc].road];
  return road.capacity_vph.value_or(params.default_capacity_vph);
}

namespace {

void require(bool ok, const std::string& message, const std::string& field) {
  if (!ok) throw Error(ErrorKind::validation, message, field);
}

void check_params(const GlobalParams& p) {
  require(p.max_route_time_s > 0, "max route time must be positive", "params.max_route_time_s");
  require(p.board_intercept_s >= 0, "must be nonnegative", "params.board_intercept_s");
  require(p.board_slope_s >= 0, "must be nonnegative", "params.board_slope_s");
  require(p.deboard_intercept_s >= 0, "must be nonnegative", "params.deboard_intercept_s");
  require(p.deboard_slope_s >= 0, "must be nonnegative", "params.deboard_slope_s");
  require(p.max_walk_m >= 0, "must be nonnegative", "params.max_walk_m");
  require(p.cluster_eps_m2 > 0, "clustering tolerance must be positive", "params.cluster_eps_m2");
  require(p.kmeans_max_iterations >= 1, "must be at least 1", "params.kmeans_max_iterations");
  require(p.time_limit_cluster_s > 0, "time limit must be positive", "params.time_limit_cluster_s");
  require(p.time_limit_stopmin_s > 0, "time limit must be positive", "params.time_limit_stopmin_s");
  require(p.time_limit_reduced_s > 0, "time limit must be positive", "params.time_limit_reduced_s");
  require(p.time_limit_full_s > 0, "time limit must be positive", "params.time_limit_full_s");
  require(p.bpr_alpha >= 0, "must be nonnegative", "params.bpr_alpha");
  require(p.bpr_beta >= 0, "must be nonnegative", "params.bpr_beta");
  require(p.default_capacity_vph > 0, "must be positive", "params.default_capacity_vph");
  require(p.peak_window_min > 0, "must be positive", "params.peak_window_min");
  require(p.walk_speed_mps > 0, "must be positive", "params.walk_speed_mps");
  if (p.status_quo_riders) require(*p.status_quo_riders >= 0, "must be nonnegative", "params.status_quo_riders");
}

template <class T>
void check_unique(const std::vector<T>& items, const std::string& key) {
  std::set<Id> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    require(seen.insert(items[i].id).second, "duplicate id " + std::to_string(items[i].id),
            key + "[" + std::to_string(i) + "].id");
  }
}

}  // namespace

void validate_instance(Instance& inst) {
  check_params(inst.params);
  require(!inst.schools.empty(), "at least one school is required", "schools");
  require(!inst.buses.empty(), "at least one bus is required", "buses");
  check_unique(inst.schools, "schools");
  check_unique(inst.students, "students");
  check_unique(inst.stops, "stops");
  check_unique(inst.buses, "buses");
  for (std::size_t k = 0; k < inst.buses.size(); ++k) {
    const auto& b = inst.buses[k];
    require(b.capacity >= 1, "bus capacity must be at least 1", "buses[" + std::to_string(k) + "].capacity");
    if (b.cluster_capacity) {
      require(*b.cluster_capacity >= 1, "clustering capacity must be at least 1",
              "buses[" + std::to_string(k) + "].cluster_capacity");
    }
  }

  const RoadNetwork& net = inst.network;
  for (std::size_t m = 0; m < inst.schools.size(); ++m) {
    inst.schools[m].location = net.snap(inst.schools[m].position, "schools[" + std::to_string(m) + "]");
  }
  for (std::size_t i = 0; i < inst.stops.size(); ++i) {
    inst.stops[i].location = net.snap(inst.stops[i].position, "stops[" + std::to_string(i) + "]");
  }
  std::unordered_map<Id, int> school_index;
  for (std::size_t m = 0; m < inst.schools.size(); ++m) school_index[inst.schools[m].id] = static_cast<int>(m);
  for (std::size_t s = 0; s < inst.students.size(); ++s) {
    auto& st = inst.students[s];
    const std::string field = "students[" + std::to_string(s) + "]";
    auto it = school_index.find(st.school_id);
    if (it == school_index.end()) {
      throw Error(ErrorKind::validation,
                  "student " + std::to_string(st.id) + " references unknown school " + std::to_string(st.school_id),
                  field + ".school");
    }
    st.school = it->second;
    if (st.car_time_s) require(*st.car_time_s >= 0, "car time must be nonnegative", field + ".car_time_s");
    st.home = net.snap(st.position, field);
  }

  std::vector<NetworkLocation> stop_locs;
  for (const auto& s : inst.stops) stop_locs.push_back(s.location);
  inst.catchments.assign(inst.students.size(), {});
  for (std::size_t s = 0; s < inst.students.size(); ++s) {
    const auto& st = inst.students[s];
    inst.catchments[s] = walk_catchment(net, st.home, stop_locs, inst.params.max_walk_m, inst.params.euclidean_walk);
    // Students who never ride are outside every routing model.
    if (inst.catchments[s].empty() && st.mode != ModeGroup::never) {
      throw Error(ErrorKind::stranded_student,
                  "student " + std::to_string(st.id) + " has no candidate stop within " +
                      std::to_string(inst.params.max_walk_m) + " m",
                  "student " + std::to_string(st.id));
    }
  }

  if (inst.params.status_quo_riders) {
    require(*inst.params.status_quo_riders <= static_cast<int>(inst.students.size()),
            "status quo riders exceed the student count", "params.status_quo_riders");
  }
}

}  // namespace sbrsp
