#include "sbrsp/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sbrsp/error.hpp"

namespace sbrsp {

using nlohmann::json;

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

json stage_json(const StageReport& s) {
  return {{"status", s.status}, {"objective", num_or_null(s.objective)}, {"best_bound", num_or_null(s.best_bound)}};
}

StageReport stage_from(const json& j) {
  StageReport s;
  s.status = j.at("status").get<std::string>();
  s.objective = num_from(j.at("objective"));
  s.best_bound = num_from(j.at("best_bound"));
  return s;
}

json point_json(Point p) { return json::array({p.x, p.y}); }

json ring_json(const Region& r) {
  json ring = json::array();
  for (Point p : r.ring) ring.push_back(point_json(p));
  return ring;
}

template <class F>
json parse_or_throw(std::string_view text, const char* what, F&& body) {
  try {
    return body(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad ") + what + " JSON: " + e.what());
  }
}

}  // namespace

std::string solution_to_json(const RouteSolution& sol) {
  json routes = json::array();
  for (const auto& r : sol.routes) {
    json visits = json::array();
    for (const auto& v : r.visits) {
      visits.push_back({{"kind", v.is_school ? "school" : "stop"},
                        {"id", v.id},
                        {"time_s", v.time},
                        {"boarded", v.boarded},
                        {"alighted", v.alighted},
                        {"load_after", v.load_after}});
    }
    const auto& st = r.stages;
    routes.push_back({{"bus", r.bus_id},
                      {"status", r.status},
                      {"message", r.message},
                      {"visits", visits},
                      {"end_time_s", r.end_time},
                      {"ride_time_s", r.ride_time},
                      {"stages",
                       {{"riders", st.riders},
                        {"candidate_stops", st.candidate_stops},
                        {"selected_stops", st.selected_stops},
                        {"stop_min", stage_json(st.stopmin)},
                        {"reduced", stage_json(st.reduced)},
                        {"lift_failed", st.lift_failed},
                        {"lift_reason", st.lift_reason},
                        {"lifted_objective", num_or_null(st.lifted_objective)},
                        {"full", stage_json(st.full)},
                        {"warm_start_kept", st.warm_start_kept}}}});
  }
  json legs = json::array();
  for (const auto& l : sol.legs) {
    legs.push_back({{"student", l.student_id},
                    {"bus", l.bus_id},
                    {"stop", l.stop_id},
                    {"school", l.school_id},
                    {"pick_time_s", l.pick_time},
                    {"drop_time_s", l.drop_time},
                    {"walk_m", l.walk_m}});
  }
  json j = {{"pipeline", sol.pipeline},
            {"status", sol.status()},
            {"total_ride_time_s", sol.total_ride_time},
            {"routes", routes},
            {"legs", legs}};
  return j.dump(2) + "\n";
}

RouteSolution parse_solution(std::string_view text, const Instance& inst) {
  std::map<Id, int> bus_index, stop_index, school_index, student_index;
  for (std::size_t i = 0; i < inst.buses.size(); ++i) bus_index[inst.buses[i].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < inst.stops.size(); ++i) stop_index[inst.stops[i].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < inst.schools.size(); ++i) school_index[inst.schools[i].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < inst.students.size(); ++i) student_index[inst.students[i].id] = static_cast<int>(i);
  auto lookup = [](const std::map<Id, int>& m, Id id, const char* what) {
    auto it = m.find(id);
    if (it == m.end()) throw Error(ErrorKind::validation, std::string("solution names unknown ") + what + " " + std::to_string(id));
    return it->second;
  };
  RouteSolution sol;
  parse_or_throw(text, "solution", [&](const json& j) {
    sol.pipeline = j.at("pipeline").get<std::string>();
    sol.total_ride_time = j.at("total_ride_time_s").get<double>();
    for (const auto& rj : j.at("routes")) {
      BusRoute r;
      r.bus_id = rj.at("bus").get<Id>();
      r.bus = lookup(bus_index, r.bus_id, "bus");
      r.status = rj.at("status").get<std::string>();
      r.message = rj.at("message").get<std::string>();
      r.end_time = rj.at("end_time_s").get<double>();
      r.ride_time = rj.at("ride_time_s").get<double>();
      for (const auto& vj : rj.at("visits")) {
        RouteVisit v;
        v.is_school = vj.at("kind").get<std::string>() == "school";
        v.id = vj.at("id").get<Id>();
        v.index = v.is_school ? lookup(school_index, v.id, "school") : lookup(stop_index, v.id, "stop");
        v.time = vj.at("time_s").get<double>();
        v.boarded = vj.at("boarded").get<int>();
        v.alighted = vj.at("alighted").get<int>();
        v.load_after = vj.at("load_after").get<int>();
        r.visits.push_back(v);
      }
      const auto& sj = rj.at("stages");
      auto& st = r.stages;
      st.riders = sj.at("riders").get<int>();
      st.candidate_stops = sj.at("candidate_stops").get<int>();
      st.selected_stops = sj.at("selected_stops").get<int>();
      st.stopmin = stage_from(sj.at("stop_min"));
      st.reduced = stage_from(sj.at("reduced"));
      st.lift_failed = sj.at("lift_failed").get<bool>();
      st.lift_reason = sj.at("lift_reason").get<std::string>();
      st.lifted_objective = num_from(sj.at("lifted_objective"));
      st.full = stage_from(sj.at("full"));
      st.warm_start_kept = sj.at("warm_start_kept").get<bool>();
      sol.routes.push_back(std::move(r));
    }
    for (const auto& lj : j.at("legs")) {
      StudentLeg l;
      l.student_id = lj.at("student").get<Id>();
      l.student = lookup(student_index, l.student_id, "student");
      l.bus_id = lj.at("bus").get<Id>();
      l.stop_id = lj.at("stop").get<Id>();
      l.school_id = lj.at("school").get<Id>();
      l.pick_time = lj.at("pick_time_s").get<double>();
      l.drop_time = lj.at("drop_time_s").get<double>();
      l.walk_m = lj.at("walk_m").get<double>();
      sol.legs.push_back(l);
    }
    return json();
  });
  return sol;
}

std::string clusters_to_json(const ClusterAssignment& ca, const Scenario& sc) {
  const auto& inst = sc.inst();
  auto ids = [&](const std::vector<int>& riders) {
    json a = json::array();
    for (int i : riders) a.push_back(inst.students[sc.riders[i]].id);
    return a;
  };
  json buses = json::array();
  for (int k = 0; k < ca.bus_count(); ++k) {
    json stops = json::array();
    if (k < static_cast<int>(ca.stops.size())) {
      for (int s : ca.stops[k]) stops.push_back(inst.stops[s].id);
    }
    json b = {{"bus", inst.buses[k].id}, {"centroid", point_json(ca.centroids[k])}, {"members", ids(ca.members(k))}, {"stops", stops}};
    if (k < static_cast<int>(ca.regions.size())) b["region"] = ring_json(ca.regions[k]);
    if (k < static_cast<int>(ca.expanded.size())) b["expanded_region"] = ring_json(ca.expanded[k]);
    if (k < static_cast<int>(ca.overlap.size())) b["overlap"] = ids(ca.overlap[k]);
    if (k < static_cast<int>(ca.interior.size())) b["interior"] = ids(ca.interior[k]);
    if (k < static_cast<int>(ca.connected.size())) b["connected"] = ids(ca.connected[k]);
    buses.push_back(b);
  }
  json j = {{"buses", buses},
            {"free_students", ids(ca.free_students)},
            {"kmeans_iterations", ca.kmeans_iterations},
            {"kmeans_converged", ca.kmeans_converged},
            {"kmeans_objective_m2", ca.kmeans_objective}};
  if (ca.rna_objective_before) j["rna_objective_before_s"] = *ca.rna_objective_before;
  if (ca.rna_objective_after) j["rna_objective_after_s"] = *ca.rna_objective_after;
  if (ca.rna_status) j["rna_status"] = *ca.rna_status;
  return j.dump(2) + "\n";
}

ClusterAssignment parse_clusters(std::string_view text, const Scenario& sc) {
  const auto& inst = sc.inst();
  std::map<Id, int> rider_pos, stop_index, bus_index;
  for (std::size_t i = 0; i < sc.riders.size(); ++i) rider_pos[inst.students[sc.riders[i]].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < inst.stops.size(); ++i) stop_index[inst.stops[i].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < inst.buses.size(); ++i) bus_index[inst.buses[i].id] = static_cast<int>(i);
  auto find = [](const std::map<Id, int>& m, Id id, const char* what) {
    auto it = m.find(id);
    if (it == m.end()) throw Error(ErrorKind::validation, std::string("clusters name unknown ") + what + " " + std::to_string(id));
    return it->second;
  };
  auto riders_of = [&](const json& a) {
    std::vector<int> out;
    for (const auto& v : a) out.push_back(find(rider_pos, v.get<Id>(), "rider"));
    return out;
  };
  auto region_of = [](const json& a) {
    Region r;
    for (const auto& p : a) r.ring.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    r.shape = r.ring.size() <= 1 ? RegionShape::point : (r.ring.size() == 2 ? RegionShape::segment : RegionShape::polygon);
    return r;
  };
  ClusterAssignment ca;
  parse_or_throw(text, "clusters", [&](const json& j) {
    const auto& buses = j.at("buses");
    if (buses.size() != inst.buses.size()) throw Error(ErrorKind::validation, "clusters file has a different fleet size");
    ca.bus_of.assign(sc.riders.size(), -1);
    for (const auto& b : buses) {
      const int k = find(bus_index, b.at("bus").get<Id>(), "bus");
      if (k != static_cast<int>(ca.centroids.size())) throw Error(ErrorKind::validation, "clusters file lists buses out of order");
      ca.centroids.push_back({b.at("centroid").at(0).get<double>(), b.at("centroid").at(1).get<double>()});
      for (int i : riders_of(b.at("members"))) ca.bus_of[i] = k;
      std::vector<int> stops;
      for (const auto& s : b.at("stops")) stops.push_back(find(stop_index, s.get<Id>(), "stop"));
      ca.stops.push_back(stops);
      if (b.contains("region")) ca.regions.push_back(region_of(b["region"]));
      if (b.contains("expanded_region")) ca.expanded.push_back(region_of(b["expanded_region"]));
      if (b.contains("overlap")) ca.overlap.push_back(riders_of(b["overlap"]));
      if (b.contains("interior")) ca.interior.push_back(riders_of(b["interior"]));
      if (b.contains("connected")) ca.connected.push_back(riders_of(b["connected"]));
    }
    for (std::size_t i = 0; i < ca.bus_of.size(); ++i) {
      if (ca.bus_of[i] < 0) throw Error(ErrorKind::validation, "rider " + std::to_string(inst.students[sc.riders[i]].id) + " is in no cluster");
    }
    ca.free_students = riders_of(j.at("free_students"));
    ca.kmeans_iterations = j.at("kmeans_iterations").get<int>();
    ca.kmeans_converged = j.at("kmeans_converged").get<bool>();
    ca.kmeans_objective = j.at("kmeans_objective_m2").get<double>();
    if (j.contains("rna_objective_before_s")) ca.rna_objective_before = j["rna_objective_before_s"].get<double>();
    if (j.contains("rna_objective_after_s")) ca.rna_objective_after = j["rna_objective_after_s"].get<double>();
    if (j.contains("rna_status")) ca.rna_status = j["rna_status"].get<std::string>();
    return json();
  });
  return ca;
}

namespace {

json metrics_json(const MetricsReport& m) {
  json students = json::array();
  for (const auto& s : m.students) {
    students.push_back({{"student", s.student_id},
                        {"bus", s.bus_id},
                        {"school", s.school_id},
                        {"brts_s", s.brts_s},
                        {"walk_s", s.walk_s},
                        {"stt_s", s.stt_s},
                        {"detour_ratio", s.detour_ratio},
                        {"pickup_order", s.pickup_order}});
  }
  json pct = json::object();
  for (const auto& [school, levels] : m.school_percentiles_min) {
    json l = json::object();
    for (const auto& [level, v] : levels) l["p" + std::to_string(level)] = v;
    pct[std::to_string(school)] = l;
  }
  json worst = json::object();
  for (const auto& [bus, schools] : m.bus_max_brts_min) {
    json s = json::object();
    for (const auto& [school, v] : schools) s[std::to_string(school)] = v;
    worst[std::to_string(bus)] = s;
  }
  return {{"instance", m.instance},
          {"riders", m.riders},
          {"total_brts_min", m.total_brts_min},
          {"avg_brts_min", m.avg_brts_min},
          {"total_stt_min", m.total_stt_min},
          {"avg_stt_min", m.avg_stt_min},
          {"stop_count", m.stop_count},
          {"students_per_stop", m.students_per_stop},
          {"total_btt_min", m.total_btt_min},
          {"avg_btt_min", m.avg_btt_min},
          {"utilization", m.utilization},
          {"utilization_definition", "riders / total bus capacity"},
          {"total_pcts_min", m.total_pcts_min ? json(*m.total_pcts_min) : json(nullptr)},
          {"car_commuters", m.car_commuters},
          {"school_brts_percentiles_min", pct},
          {"bus_max_brts_min", worst},
          {"students", students}};
}

}  // namespace

std::string metrics_to_json(const MetricsReport& m) { return metrics_json(m).dump(2) + "\n"; }

std::string equilibrium_to_json(const EquilibriumResult& eq, const Instance& inst) {
  auto by_id = [&](const std::map<int, double>& m) {
    json o = json::object();
    for (const auto& [s, v] : m) o[std::to_string(inst.students[s].id)] = num_or_null(v);
    return o;
  };
  json iterations = json::array();
  for (const auto& it : eq.iterations) {
    json riders = json::array();
    for (int s : it.riders) riders.push_back(inst.students[s].id);
    const auto& m = it.metrics;
    iterations.push_back({{"iteration", it.iteration},
                          {"riders", static_cast<int>(it.riders.size())},
                          {"rider_ids", riders},
                          {"utilization", m.utilization},
                          {"total_brts_min", m.total_brts_min},
                          {"avg_brts_min", m.avg_brts_min},
                          {"total_stt_min", m.total_stt_min},
                          {"avg_stt_min", m.avg_stt_min},
                          {"total_pcts_min", m.total_pcts_min ? json(*m.total_pcts_min) : json(nullptr)},
                          {"car_trips", it.car_trips},
                          {"objective_min", it.objective},
                          {"car_time_s", by_id(it.car_time_s)},
                          {"bus_time_s", by_id(it.bus_time_s)},
                          {"probability", by_id(it.probability)}});
  }
  json flows = json::array();
  for (double f : eq.final().congestion.flows) flows.push_back(f);
  json j = {{"converged", eq.converged},
            {"cycle_length", eq.cycle_length ? json(*eq.cycle_length) : json(nullptr)},
            {"count_stable_iteration", eq.count_stable_iteration ? json(*eq.count_stable_iteration) : json(nullptr)},
            {"final_iteration", eq.final().iteration},
            {"A", eq.calibration.A},
            {"calibration_target", eq.calibration.target},
            {"calibration_achieved", eq.calibration.achieved},
            {"cutoff", eq.cutoff ? json(*eq.cutoff) : json(nullptr)},
            {"target_riders", eq.target_riders},
            {"arc_flows", flows},
            {"iterations", iterations},
            {"final_solution", json::parse(solution_to_json(eq.final().solution))}};
  return j.dump(2) + "\n";
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"config", r.name},
                 {"status", r.status},
                 {"objective_s", r.objective ? json(*r.objective) : json(nullptr)},
                 {"gap_percent", r.gap_percent ? json(*r.gap_percent) : json(nullptr)},
                 {"config_hash", r.config_hash},
                 {"seed", r.seed},
                 {"message", r.message}});
  }
  return a.dump(2) + "\n";
}

namespace {

json polygon_geometry(const Region& r) {
  if (r.ring.size() == 1) return {{"type", "Point"}, {"coordinates", point_json(r.ring[0])}};
  if (r.ring.size() == 2) return {{"type", "LineString"}, {"coordinates", ring_json(r)}};
  json ring = ring_json(r);
  if (!r.ring.empty()) ring.push_back(point_json(r.ring.front()));
  return {{"type", "Polygon"}, {"coordinates", json::array({ring})}};
}

}  // namespace

std::string regions_geojson(const ClusterAssignment& ca, const Scenario& sc) {
  const auto& inst = sc.inst();
  json features = json::array();
  auto add = [&](const std::vector<Region>& regions, const char* kind) {
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (regions[k].ring.empty()) continue;
      features.push_back({{"type", "Feature"},
                          {"properties", {{"bus", inst.buses[k].id}, {"kind", kind}}},
                          {"geometry", polygon_geometry(regions[k])}});
    }
  };
  add(ca.regions, "service_region");
  add(ca.expanded, "expanded_region");
  return json({{"type", "FeatureCollection"}, {"features", features}}).dump(2) + "\n";
}

std::string routes_geojson(const RouteSolution& sol, const Instance& inst) {
  json features = json::array();
  for (const auto& r : sol.routes) {
    json line = json::array();
    for (const auto& v : r.visits) {
      line.push_back(point_json(v.is_school ? inst.schools[v.index].position : inst.stops[v.index].position));
    }
    if (line.size() < 2) continue;
    features.push_back({{"type", "Feature"},
                        {"properties", {{"bus", r.bus_id}, {"ride_time_s", r.ride_time}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", line}}}});
  }
  return json({{"type", "FeatureCollection"}, {"features", features}}).dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::usage, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::usage, "cannot write " + path.string());
  out << text;
}

}  // namespace sbrsp
