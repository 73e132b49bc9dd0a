#include "sbrsp/network.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "sbrsp/error.hpp"

namespace sbrsp {

RoadNetwork::RoadNetwork(std::vector<NetworkNode> nodes, std::vector<Road> roads)
    : nodes_(std::move(nodes)), roads_(std::move(roads)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, static_cast<int>(i)).second) {
      throw Error(ErrorKind::validation, "duplicate node id " + std::to_string(nodes_[i].id),
                  "network.nodes[" + std::to_string(i) + "].id");
    }
  }
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  for (std::size_t r = 0; r < roads_.size(); ++r) {
    const Road& road = roads_[r];
    const std::string path = "network.edges[" + std::to_string(r) + "]";
    auto a = index_.find(road.from);
    auto b = index_.find(road.to);
    if (a == index_.end()) throw Error(ErrorKind::validation, "edge references unknown node " + std::to_string(road.from), path + ".from");
    if (b == index_.end()) throw Error(ErrorKind::validation, "edge references unknown node " + std::to_string(road.to), path + ".to");
    if (a->second == b->second) throw Error(ErrorKind::validation, "self-loop edge", path);
    if (!(road.length_m > 0)) throw Error(ErrorKind::validation, "edge length must be positive", path + ".length_m");
    if (!(road.freeflow_mps > 0)) throw Error(ErrorKind::validation, "edge speed must be positive", path + ".freeflow_mps");
    if (road.capacity_vph && !(*road.capacity_vph > 0)) throw Error(ErrorKind::validation, "edge capacity must be positive", path + ".capacity_vph");
    road_ends_.emplace_back(a->second, b->second);
    const int fwd = static_cast<int>(arcs_.size());
    arcs_.push_back({a->second, b->second, static_cast<int>(r), road.length_m, road.freeflow_mps});
    int bwd = -1;
    if (!road.oneway) {
      bwd = static_cast<int>(arcs_.size());
      arcs_.push_back({b->second, a->second, static_cast<int>(r), road.length_m, road.freeflow_mps});
    }
    road_arcs_.emplace_back(fwd, bwd);
  }
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    out_[arcs_[i].tail].push_back(static_cast<int>(i));
    in_[arcs_[i].head].push_back(static_cast<int>(i));
  }
}

int RoadNetwork::node_index(Id id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::validation, "unknown node id " + std::to_string(id));
  return it->second;
}

std::vector<double> RoadNetwork::freeflow_times() const {
  std::vector<double> t(arcs_.size());
  for (std::size_t i = 0; i < arcs_.size(); ++i) t[i] = arcs_[i].freeflow_time();
  return t;
}

std::vector<double> RoadNetwork::lengths() const {
  std::vector<double> t(arcs_.size());
  for (std::size_t i = 0; i < arcs_.size(); ++i) t[i] = arcs_[i].length_m;
  return t;
}

double RoadNetwork::average_degree() const {
  if (nodes_.empty()) return 0.0;
  return 2.0 * static_cast<double>(roads_.size()) / static_cast<double>(nodes_.size());
}

NetworkLocation RoadNetwork::snap(Point p, const std::string& what) const {
  NetworkLocation best;
  best.snap_distance = INFINITY;
  for (std::size_t r = 0; r < roads_.size(); ++r) {
    const Point a = nodes_[road_ends_[r].first].pos;
    const Point b = nodes_[road_ends_[r].second].pos;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Point q{a.x + t * dx, a.y + t * dy};
    const double d = distance(p, q);
    if (d < best.snap_distance) {
      best.point = q;
      best.road = static_cast<int>(r);
      best.offset = t;
      best.snap_distance = d;
    }
  }
  if (best.road < 0) throw Error(ErrorKind::validation, "network has no edges to snap to", what);
  if (best.snap_distance > kMaxSnapDistance) {
    throw Error(ErrorKind::validation,
                "location is " + std::to_string(best.snap_distance) + " m from the nearest road (limit 500 m)", what);
  }
  return best;
}

NetworkLocation RoadNetwork::location_of_node(int node) const {
  for (std::size_t r = 0; r < roads_.size(); ++r) {
    if (road_ends_[r].first == node) return {nodes_[node].pos, static_cast<int>(r), 0.0, 0.0};
    if (road_ends_[r].second == node) return {nodes_[node].pos, static_cast<int>(r), 1.0, 0.0};
  }
  throw Error(ErrorKind::validation, "isolated node " + std::to_string(nodes_[node].id));
}

ShortestPathTree::ShortestPathTree(const RoadNetwork& net, const NetworkLocation& origin,
                                   std::span<const double> arc_cost, SearchMode mode, double cutoff)
    : net_(&net), origin_(origin), cost_(arc_cost), mode_(mode) {
  const std::size_t n = net.node_count();
  dist_.assign(n, INFINITY);
  pred_.assign(n, -1);
  first_arc_.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  auto seed = [&](int node, double c, int arc) {
    if (c < dist_[node] && c <= cutoff) {
      dist_[node] = c;
      first_arc_[node] = arc;
      heap.emplace(c, node);
    }
  };
  const int r = origin.road;
  const int u = net.road_from(r);
  const int v = net.road_to(r);
  const int af = net.forward_arc(r);
  const int ab = net.backward_arc(r);
  const double f = origin.offset;
  switch (mode) {
    case SearchMode::forward:
      seed(v, (1 - f) * arc_cost[af], af);
      if (ab >= 0) seed(u, f * arc_cost[ab], ab);
      break;
    case SearchMode::backward:
      seed(u, f * arc_cost[af], af);
      if (ab >= 0) seed(v, (1 - f) * arc_cost[ab], ab);
      break;
    case SearchMode::undirected:
      seed(v, (1 - f) * arc_cost[af], af);
      seed(u, f * arc_cost[af], af);
      break;
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > dist_[x]) continue;
    auto relax = [&](int arc, int y, double c) {
      const double nd = d + c;
      if (nd < dist_[y] && nd <= cutoff) {
        dist_[y] = nd;
        pred_[y] = arc;
        heap.emplace(nd, y);
      }
    };
    if (mode != SearchMode::backward) {
      for (int a : net.out_arcs(x)) relax(a, net.arcs()[a].head, this->arc_cost(a));
    }
    if (mode != SearchMode::forward) {
      for (int a : net.in_arcs(x)) relax(a, net.arcs()[a].tail, this->arc_cost(a));
    }
  }
}

double ShortestPathTree::arc_cost(int arc) const {
  if (mode_ == SearchMode::undirected) return cost_[net_->forward_arc(net_->arcs()[arc].road)];
  return cost_[arc];
}

double ShortestPathTree::cost_to(const NetworkLocation& t) const {
  const RoadNetwork& net = *net_;
  const int r = t.road;
  const int u = net.road_from(r);
  const int v = net.road_to(r);
  const int af = net.forward_arc(r);
  const int ab = net.backward_arc(r);
  const double g = t.offset;
  const double f = origin_.offset;
  double best = INFINITY;
  switch (mode_) {
    case SearchMode::forward:
      best = std::min(best, dist_[u] + g * cost_[af]);
      if (ab >= 0) best = std::min(best, dist_[v] + (1 - g) * cost_[ab]);
      if (r == origin_.road) {
        if (g >= f) best = std::min(best, (g - f) * cost_[af]);
        if (ab >= 0 && g <= f) best = std::min(best, (f - g) * cost_[ab]);
      }
      break;
    case SearchMode::backward:
      best = std::min(best, (1 - g) * cost_[af] + dist_[v]);
      if (ab >= 0) best = std::min(best, g * cost_[ab] + dist_[u]);
      if (r == origin_.road) {
        if (f >= g) best = std::min(best, (f - g) * cost_[af]);
        if (ab >= 0 && f <= g) best = std::min(best, (g - f) * cost_[ab]);
      }
      break;
    case SearchMode::undirected:
      best = std::min(best, dist_[u] + g * cost_[af]);
      best = std::min(best, dist_[v] + (1 - g) * cost_[af]);
      if (r == origin_.road) best = std::min(best, std::abs(g - f) * cost_[af]);
      break;
  }
  return best;
}

std::vector<int> ShortestPathTree::path_arcs(const NetworkLocation& t) const {
  std::vector<int> arcs;
  if (mode_ != SearchMode::forward) return arcs;
  const RoadNetwork& net = *net_;
  const int r = t.road;
  const int u = net.road_from(r);
  const int v = net.road_to(r);
  const int af = net.forward_arc(r);
  const int ab = net.backward_arc(r);
  const double g = t.offset;
  const double f = origin_.offset;
  double best = INFINITY;
  int end_node = -1;
  int last_arc = -1;
  auto consider = [&](double c, int node, int arc) {
    if (c < best) {
      best = c;
      end_node = node;
      last_arc = arc;
    }
  };
  if (r == origin_.road) {
    if (g >= f) consider((g - f) * cost_[af], -1, af);
    if (ab >= 0 && g <= f) consider((f - g) * cost_[ab], -1, ab);
  }
  consider(dist_[u] + g * cost_[af], u, af);
  if (ab >= 0) consider(dist_[v] + (1 - g) * cost_[ab], v, ab);
  if (!std::isfinite(best)) return arcs;
  arcs.push_back(last_arc);
  int x = end_node;
  while (x >= 0) {
    if (pred_[x] < 0) {
      arcs.push_back(first_arc_[x]);
      break;
    }
    arcs.push_back(pred_[x]);
    x = net.arcs()[pred_[x]].tail;
  }
  std::reverse(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

double shortest_time(const RoadNetwork& net, const NetworkLocation& a, const NetworkLocation& b,
                     std::span<const double> arc_times) {
  std::vector<double> ff;
  if (arc_times.empty()) {
    ff = net.freeflow_times();
    arc_times = ff;
  }
  ShortestPathTree tree(net, a, arc_times, SearchMode::forward);
  const double t = tree.cost_to(b);
  if (!std::isfinite(t)) throw Error(ErrorKind::disconnected, "no directed path between the two locations");
  return t;
}

double walk_distance(const RoadNetwork& net, const NetworkLocation& a, const NetworkLocation& b) {
  const auto len = net.lengths();
  ShortestPathTree tree(net, a, len, SearchMode::undirected);
  return tree.cost_to(b);
}

bool Subgraph::contains_node(int node) const { return std::binary_search(nodes.begin(), nodes.end(), node); }

bool Subgraph::contains_location(const RoadNetwork& net, const NetworkLocation& loc) const {
  if (std::binary_search(roads.begin(), roads.end(), loc.road)) return true;
  if (loc.offset == 0.0) return contains_node(net.road_from(loc.road));
  if (loc.offset == 1.0) return contains_node(net.road_to(loc.road));
  return false;
}

Subgraph restrict_and_largest_component(const RoadNetwork& net, const Region& region) {
  const std::size_t n = net.node_count();
  std::vector<char> inside(n, 0);
  for (std::size_t i = 0; i < n; ++i) inside[i] = contains(region, net.nodes()[i].pos) ? 1 : 0;

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> inner_roads;
  for (std::size_t r = 0; r < net.roads().size(); ++r) {
    const int a = net.road_from(static_cast<int>(r));
    const int b = net.road_to(static_cast<int>(r));
    if (inside[a] && inside[b]) {
      inner_roads.push_back(static_cast<int>(r));
      parent[find(a)] = find(b);
    }
  }
  // Per component root: size and smallest node id.
  std::unordered_map<int, std::pair<int, Id>> stats;
  for (std::size_t i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    auto& s = stats.try_emplace(find(static_cast<int>(i)), 0, net.nodes()[i].id).first->second;
    s.first += 1;
    s.second = std::min(s.second, net.nodes()[i].id);
  }
  Subgraph out;
  if (stats.empty()) return out;
  int best_root = -1;
  std::pair<int, Id> best_stat{0, 0};
  for (const auto& [root, s] : stats) {
    if (best_root < 0 || s.first > best_stat.first || (s.first == best_stat.first && s.second < best_stat.second)) {
      best_root = root;
      best_stat = s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (inside[i] && find(static_cast<int>(i)) == best_root) out.nodes.push_back(static_cast<int>(i));
  }
  for (int r : inner_roads) {
    if (find(net.road_from(r)) == best_root) out.roads.push_back(r);
  }
  return out;
}

std::vector<StopReach> walk_catchment(const RoadNetwork& net, const NetworkLocation& home,
                                      std::span<const NetworkLocation> stops, double max_walk, bool euclidean) {
  std::vector<StopReach> out;
  constexpr double kSlack = 1e-9;
  if (euclidean) {
    for (std::size_t i = 0; i < stops.size(); ++i) {
      const double d = distance(home.point, stops[i].point);
      if (d <= max_walk + kSlack) out.push_back({static_cast<int>(i), d});
    }
    return out;
  }
  const auto len = net.lengths();
  ShortestPathTree tree(net, home, len, SearchMode::undirected, max_walk + kSlack);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const double d = tree.cost_to(stops[i]);
    if (d <= max_walk + kSlack) out.push_back({static_cast<int>(i), d});
  }
  return out;
}

}  // namespace sbrsp
