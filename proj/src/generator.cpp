#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sbrsp/error.hpp"
#include "sbrsp/instance.hpp"
#include "sbrsp/random.hpp"

namespace sbrsp {

namespace {

// Speed class (m/s) and its per-lane hourly capacity.
struct RoadClass {
  double speed;
  double capacity;
};
constexpr RoadClass kClasses[] = {{13.41, 600.0}, {20.12, 900.0}, {24.59, 1200.0}};

// Target average degree of the "mixed" style; sparse rural networks sit just above a tree.
constexpr double kMixedDegree = 2.04;

std::vector<Point> grid_points(int n, double side, std::vector<std::pair<int, int>>& edges) {
  const int g = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const double step = side / (g - 1);
  std::vector<Point> pts;
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      pts.push_back({c * step, r * step});
      const int id = r * g + c;
      if (c > 0) edges.emplace_back(id - 1, id);
      if (r > 0) edges.emplace_back(id - g, id);
    }
  }
  return pts;
}

std::vector<Point> tree_points(int n, double side, Rng& rng, std::vector<std::pair<int, int>>& edges) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({uniform(rng, 0, side), uniform(rng, 0, side)});
  for (int i = 1; i < n; ++i) {
    int best = 0;
    for (int j = 1; j < i; ++j) {
      if (squared_distance(pts[i], pts[j]) < squared_distance(pts[i], pts[best])) best = j;
    }
    edges.emplace_back(best, i);
  }
  return pts;
}

void add_short_edges(const std::vector<Point>& pts, std::vector<std::pair<int, int>>& edges, int extra) {
  std::set<std::pair<int, int>> have;
  for (auto [a, b] : edges) have.insert({std::min(a, b), std::max(a, b)});
  std::vector<std::tuple<double, int, int>> cand;
  const int n = static_cast<int>(pts.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!have.count({a, b})) cand.emplace_back(squared_distance(pts[a], pts[b]), a, b);
    }
  }
  std::sort(cand.begin(), cand.end());
  for (int i = 0; i < extra && i < static_cast<int>(cand.size()); ++i) {
    edges.emplace_back(std::get<1>(cand[i]), std::get<2>(cand[i]));
  }
}

// Uniform point along the road network, weighted by road length.
NetworkLocation random_road_point(const RoadNetwork& net, const std::vector<double>& cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  const int r = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
  const int road = std::min(r, static_cast<int>(cumulative.size()) - 1);
  const double t = uniform01(rng);
  const Point a = net.nodes()[net.road_from(road)].pos;
  const Point b = net.nodes()[net.road_to(road)].pos;
  NetworkLocation loc;
  loc.road = road;
  loc.offset = t;
  loc.point = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  return loc;
}

}  // namespace

Instance generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.students < 0) throw Error(ErrorKind::validation, "student count must be nonnegative", "spec.students");
  if (spec.schools < 1) throw Error(ErrorKind::validation, "at least one school is required", "spec.schools");
  if (spec.buses < 1) throw Error(ErrorKind::validation, "at least one bus is required", "spec.buses");
  if (spec.stop_density < 0) throw Error(ErrorKind::validation, "stop density must be nonnegative", "spec.stop_density");
  if (spec.stop_density == 0 && spec.students > 0) {
    throw Error(ErrorKind::validation, "zero stop density cannot serve a nonzero student count", "spec.stop_density");
  }
  if (spec.network_nodes < 2) throw Error(ErrorKind::validation, "at least two network nodes", "spec.network_nodes");
  if (!(spec.area_km > 0)) throw Error(ErrorKind::validation, "area must be positive", "spec.area_km");
  if (spec.bus_capacity && *spec.bus_capacity < 1) {
    throw Error(ErrorKind::validation, "bus capacity must be at least 1", "spec.bus_capacity");
  }

  Rng rng(seed);
  const double side = spec.area_km * 1000.0;
  std::vector<std::pair<int, int>> edges;
  std::vector<Point> pts;
  if (spec.network_style == "grid") {
    pts = grid_points(spec.network_nodes, side, edges);
  } else if (spec.network_style == "random-tree") {
    pts = tree_points(spec.network_nodes, side, rng, edges);
  } else if (spec.network_style == "mixed") {
    pts = tree_points(spec.network_nodes, side, rng, edges);
    const int target = static_cast<int>(std::lround(kMixedDegree * spec.network_nodes / 2.0));
    add_short_edges(pts, edges, target - static_cast<int>(edges.size()));
  } else {
    throw Error(ErrorKind::validation, "unknown network style '" + spec.network_style + "'", "spec.network_style");
  }

  std::vector<NetworkNode> nodes;
  for (std::size_t i = 0; i < pts.size(); ++i) nodes.push_back({static_cast<Id>(i), pts[i]});
  std::vector<Road> roads;
  for (auto [a, b] : edges) {
    const RoadClass cls = kClasses[uniform_index(rng, 3)];
    Road r;
    r.from = a;
    r.to = b;
    r.length_m = std::max(1.0, distance(pts[a], pts[b]));
    r.freeflow_mps = cls.speed;
    r.capacity_vph = cls.capacity;
    r.oneway = false;
    roads.push_back(r);
  }

  Instance inst;
  inst.name = "synthetic-" + spec.network_style + "-" + std::to_string(seed);
  inst.network = RoadNetwork(std::move(nodes), std::move(roads));
  const RoadNetwork& net = inst.network;
  std::vector<double> cumulative;
  double total_len = 0;
  for (const auto& r : net.roads()) {
    total_len += r.length_m;
    cumulative.push_back(total_len);
  }

  if (spec.max_route_time_s) inst.params.max_route_time_s = *spec.max_route_time_s;
  if (spec.max_walk_m) inst.params.max_walk_m = *spec.max_walk_m;

  std::vector<int> node_order(net.node_count());
  for (std::size_t i = 0; i < node_order.size(); ++i) node_order[i] = static_cast<int>(i);
  for (int m = 0; m < spec.schools; ++m) {
    const int pick = m + uniform_index(rng, static_cast<int>(node_order.size()) - m);
    std::swap(node_order[m], node_order[pick]);
    School s;
    s.id = m;
    s.name = "School " + std::string(1, static_cast<char>('A' + m % 26)) + (m >= 26 ? std::to_string(m / 26) : "");
    s.position = net.nodes()[node_order[m]].pos;
    inst.schools.push_back(s);
  }

  for (int i = 0; i < spec.students; ++i) {
    const NetworkLocation loc = random_road_point(net, cumulative, rng);
    Student s;
    s.id = i;
    // Homes sit a short driveway off the road.
    const double off = uniform(rng, -20.0, 20.0);
    const Point a = net.nodes()[net.road_from(loc.road)].pos;
    const Point b = net.nodes()[net.road_to(loc.road)].pos;
    const double len = std::max(1e-9, distance(a, b));
    s.position = {loc.point.x - off * (b.y - a.y) / len, loc.point.y + off * (b.x - a.x) / len};
    s.school_id = uniform_index(rng, spec.schools);
    const double u = uniform01(rng);
    if (u < spec.never_share) {
      s.mode = ModeGroup::never;
      s.rides_bus = false;
    } else if (u < spec.never_share + spec.sometimes_share) {
      s.mode = ModeGroup::sometimes;
      s.rides_bus = bernoulli(rng, spec.rider_share);
    } else {
      s.mode = ModeGroup::always;
      s.rides_bus = true;
    }
    inst.students.push_back(s);
  }

  const int stop_count = static_cast<int>(std::ceil(spec.stop_density * total_len / 1000.0));
  for (int i = 0; i < stop_count && spec.students > 0; ++i) {
    const NetworkLocation loc = random_road_point(net, cumulative, rng);
    inst.stops.push_back({static_cast<Id>(i), loc.point, loc});
  }

  // Coverage pass: a student with no stop in walking range gets one at home.
  std::vector<NetworkLocation> stop_locs;
  for (const auto& st : inst.stops) stop_locs.push_back(net.snap(st.position, "stop"));
  for (auto& s : inst.students) {
    if (s.mode == ModeGroup::never) continue;
    const NetworkLocation home = net.snap(s.position, "student");
    if (walk_catchment(net, home, stop_locs, inst.params.max_walk_m).empty()) {
      const Id id = static_cast<Id>(inst.stops.size());
      inst.stops.push_back({id, home.point, home});
      stop_locs.push_back(home);
    }
  }

  int riders = 0;
  for (const auto& s : inst.students) riders += s.mode != ModeGroup::never ? 1 : 0;
  const int cap = spec.bus_capacity.value_or(
      std::max(1, static_cast<int>(std::ceil(riders / (0.8 * spec.buses)))));
  for (int k = 0; k < spec.buses; ++k) inst.buses.push_back({k, cap, std::nullopt});

  validate_instance(inst);
  return inst;
}

}  // namespace sbrsp
