#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/instance.hpp"

namespace sbrsp {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorKind::validation, "expected an object", path);
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorKind::validation, std::string("missing field '") + key + "'", path + "." + key);
  return *it;
}

double number(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) throw Error(ErrorKind::validation, "expected a number", path + "." + key);
  return v.get<double>();
}

Id integer_id(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_integer()) throw Error(ErrorKind::validation, "expected an integer id", path + "." + key);
  return v.get<Id>();
}

const json& array(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) throw Error(ErrorKind::validation, "expected an array", path.empty() ? key : path + "." + key);
  return v;
}

template <class T>
void opt(const json& obj, const char* key, T& out, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::validation, "wrong value type", path + "." + key);
  }
}

constexpr double kMetersPerMile = 1609.344;

GlobalParams parse_params(const json& j) {
  GlobalParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorKind::validation, "expected an object", "params");
  const std::string path = "params";
  opt(j, "max_route_time_s", p.max_route_time_s, path);
  opt(j, "board_intercept_s", p.board_intercept_s, path);
  opt(j, "board_slope_s", p.board_slope_s, path);
  opt(j, "deboard_intercept_s", p.deboard_intercept_s, path);
  opt(j, "deboard_slope_s", p.deboard_slope_s, path);
  if (j.contains("max_walk_mi")) {
    double mi = 0;
    opt(j, "max_walk_mi", mi, path);
    p.max_walk_m = mi * kMetersPerMile;
  }
  opt(j, "max_walk_m", p.max_walk_m, path);
  if (j.contains("cluster_eps_km2")) {
    double km2 = 0;
    opt(j, "cluster_eps_km2", km2, path);
    p.cluster_eps_m2 = km2 * 1e6;
  }
  opt(j, "cluster_eps_m2", p.cluster_eps_m2, path);
  opt(j, "kmeans_max_iterations", p.kmeans_max_iterations, path);
  opt(j, "time_limit_cluster_s", p.time_limit_cluster_s, path);
  opt(j, "time_limit_stopmin_s", p.time_limit_stopmin_s, path);
  opt(j, "time_limit_reduced_s", p.time_limit_reduced_s, path);
  opt(j, "time_limit_full_s", p.time_limit_full_s, path);
  opt(j, "bpr_alpha", p.bpr_alpha, path);
  opt(j, "bpr_beta", p.bpr_beta, path);
  opt(j, "default_capacity_vph", p.default_capacity_vph, path);
  opt(j, "peak_window_min", p.peak_window_min, path);
  opt(j, "walk_speed_mps", p.walk_speed_mps, path);
  opt(j, "euclidean_walk", p.euclidean_walk, path);
  if (j.contains("status_quo_riders") && !j["status_quo_riders"].is_null()) {
    int v = 0;
    opt(j, "status_quo_riders", v, path);
    p.status_quo_riders = v;
  }
  return p;
}

json params_json(const GlobalParams& p) {
  json j = {
      {"max_route_time_s", p.max_route_time_s},
      {"board_intercept_s", p.board_intercept_s},
      {"board_slope_s", p.board_slope_s},
      {"deboard_intercept_s", p.deboard_intercept_s},
      {"deboard_slope_s", p.deboard_slope_s},
      {"max_walk_m", p.max_walk_m},
      {"cluster_eps_m2", p.cluster_eps_m2},
      {"kmeans_max_iterations", p.kmeans_max_iterations},
      {"time_limit_cluster_s", p.time_limit_cluster_s},
      {"time_limit_stopmin_s", p.time_limit_stopmin_s},
      {"time_limit_reduced_s", p.time_limit_reduced_s},
      {"time_limit_full_s", p.time_limit_full_s},
      {"bpr_alpha", p.bpr_alpha},
      {"bpr_beta", p.bpr_beta},
      {"default_capacity_vph", p.default_capacity_vph},
      {"peak_window_min", p.peak_window_min},
      {"walk_speed_mps", p.walk_speed_mps},
      {"euclidean_walk", p.euclidean_walk},
  };
  if (p.status_quo_riders) j["status_quo_riders"] = *p.status_quo_riders;
  return j;
}

Point point_of(const json& obj, const std::string& path) {
  return {number(obj, "x_m", path), number(obj, "y_m", path)};
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::parse, "instance file must hold a JSON object");

  Instance inst;
  if (j.contains("name")) opt(j, "name", inst.name, "");

  const json& jn = field(j, "network", "");
  std::vector<NetworkNode> nodes;
  const json& jnodes = array(jn, "nodes", "network");
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string path = "network.nodes[" + std::to_string(i) + "]";
    nodes.push_back({integer_id(jnodes[i], "id", path), point_of(jnodes[i], path)});
  }
  std::vector<Road> roads;
  const json& jedges = array(jn, "edges", "network");
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const std::string path = "network.edges[" + std::to_string(i) + "]";
    const json& e = jedges[i];
    Road r;
    r.from = integer_id(e, "from", path);
    r.to = integer_id(e, "to", path);
    r.length_m = number(e, "length_m", path);
    r.freeflow_mps = number(e, "freeflow_mps", path);
    if (e.contains("capacity_vph") && !e["capacity_vph"].is_null()) r.capacity_vph = number(e, "capacity_vph", path);
    opt(e, "oneway", r.oneway, path);
    roads.push_back(r);
  }
  inst.network = RoadNetwork(std::move(nodes), std::move(roads));

  const json& jschools = array(j, "schools", "");
  for (std::size_t i = 0; i < jschools.size(); ++i) {
    const std::string path = "schools[" + std::to_string(i) + "]";
    School s;
    s.id = integer_id(jschools[i], "id", path);
    s.position = point_of(jschools[i], path);
    opt(jschools[i], "name", s.name, path);
    inst.schools.push_back(s);
  }
  const json& jstudents = array(j, "students", "");
  for (std::size_t i = 0; i < jstudents.size(); ++i) {
    const std::string path = "students[" + std::to_string(i) + "]";
    const json& e = jstudents[i];
    Student s;
    s.id = integer_id(e, "id", path);
    s.position = point_of(e, path);
    s.school_id = integer_id(e, "school", path);
    if (e.contains("mode_group")) {
      std::string g;
      opt(e, "mode_group", g, path);
      try {
        s.mode = parse_mode_group(g);
      } catch (const Error& err) {
        throw Error(ErrorKind::validation, err.what(), path + ".mode_group");
      }
    }
    if (e.contains("car_time_s") && !e["car_time_s"].is_null()) s.car_time_s = number(e, "car_time_s", path);
    opt(e, "rides_bus", s.rides_bus, path);
    inst.students.push_back(s);
  }
  const json& jstops = array(j, "stops", "");
  for (std::size_t i = 0; i < jstops.size(); ++i) {
    const std::string path = "stops[" + std::to_string(i) + "]";
    inst.stops.push_back({integer_id(jstops[i], "id", path), point_of(jstops[i], path), {}});
  }
  const json& jbuses = array(j, "buses", "");
  for (std::size_t i = 0; i < jbuses.size(); ++i) {
    const std::string path = "buses[" + std::to_string(i) + "]";
    const json& e = jbuses[i];
    Bus b;
    b.id = integer_id(e, "id", path);
    const json& cap = field(e, "capacity", path);
    if (!cap.is_number_integer()) throw Error(ErrorKind::validation, "expected an integer", path + ".capacity");
    b.capacity = cap.get<int>();
    if (e.contains("cluster_capacity") && !e["cluster_capacity"].is_null()) {
      const json& cc = e["cluster_capacity"];
      if (!cc.is_number_integer()) throw Error(ErrorKind::validation, "expected an integer", path + ".cluster_capacity");
      b.cluster_capacity = cc.get<int>();
    }
    inst.buses.push_back(b);
  }
  inst.params = parse_params(j.contains("params") ? j["params"] : json());
  validate_instance(inst);
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["name"] = inst.name;
  json nodes = json::array();
  for (const auto& n : inst.network.nodes()) nodes.push_back({{"id", n.id}, {"x_m", n.pos.x}, {"y_m", n.pos.y}});
  json edges = json::array();
  for (const auto& r : inst.network.roads()) {
    json e = {{"from", r.from}, {"to", r.to}, {"length_m", r.length_m}, {"freeflow_mps", r.freeflow_mps}};
    if (r.capacity_vph) e["capacity_vph"] = *r.capacity_vph;
    e["oneway"] = r.oneway;
    edges.push_back(e);
  }
  j["network"] = {{"nodes", nodes}, {"edges", edges}};
  json schools = json::array();
  for (const auto& s : inst.schools) {
    schools.push_back({{"id", s.id}, {"name", s.name}, {"x_m", s.position.x}, {"y_m", s.position.y}});
  }
  j["schools"] = schools;
  json students = json::array();
  for (const auto& s : inst.students) {
    json e = {{"id", s.id},
              {"x_m", s.position.x},
              {"y_m", s.position.y},
              {"school", s.school_id},
              {"mode_group", std::string(mode_group_name(s.mode))},
              {"rides_bus", s.rides_bus}};
    if (s.car_time_s) e["car_time_s"] = *s.car_time_s;
    students.push_back(e);
  }
  j["students"] = students;
  json stops = json::array();
  for (const auto& s : inst.stops) stops.push_back({{"id", s.id}, {"x_m", s.position.x}, {"y_m", s.position.y}});
  j["stops"] = stops;
  json buses = json::array();
  for (const auto& b : inst.buses) {
    json e = {{"id", b.id}, {"capacity", b.capacity}};
    if (b.cluster_capacity) e["cluster_capacity"] = *b.cluster_capacity;
    buses.push_back(e);
  }
  j["buses"] = buses;
  j["params"] = params_json(inst.params);
  return j.dump(1) + "\n";
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::parse, "cannot write " + path.string(), path.string());
  out << instance_to_json(inst);
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
  GeneratorSpec g;
  const std::string path = "spec";
  opt(j, "students", g.students, path);
  opt(j, "schools", g.schools, path);
  opt(j, "stop_density", g.stop_density, path);
  opt(j, "network_style", g.network_style, path);
  opt(j, "buses", g.buses, path);
  if (j.contains("bus_capacity")) {
    int c = 0;
    opt(j, "bus_capacity", c, path);
    g.bus_capacity = c;
  }
  opt(j, "area_km", g.area_km, path);
  opt(j, "network_nodes", g.network_nodes, path);
  opt(j, "sometimes_share", g.sometimes_share, path);
  opt(j, "never_share", g.never_share, path);
  opt(j, "rider_share", g.rider_share, path);
  if (j.contains("max_route_time_s")) {
    double v = 0;
    opt(j, "max_route_time_s", v, path);
    g.max_route_time_s = v;
  }
  if (j.contains("max_walk_m")) {
    double v = 0;
    opt(j, "max_walk_m", v, path);
    g.max_walk_m = v;
  }
  return g;
}

}  // namespace sbrsp
