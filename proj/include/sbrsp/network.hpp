#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbrsp/geometry.hpp"

namespace sbrsp {

using Id = std::int64_t;

struct NetworkNode {
  Id id = 0;
  Point pos;
};

// Road segment as given in the input file.
struct Road {
  Id from = 0;
  Id to = 0;
  double length_m = 0.0;
  double freeflow_mps = 0.0;
  std::optional<double> capacity_vph;
  bool oneway = false;
};

// Directed arc; a two-way road yields two arcs.
struct Arc {
  int tail = 0;
  int head = 0;
  int road = 0;
  double length_m = 0.0;
  double freeflow_mps = 0.0;
  double freeflow_time() const { return length_m / freeflow_mps; }
};

// A point on a road. `offset` is the fraction of the road from its `from` node.
struct NetworkLocation {
  Point point;
  int road = -1;
  double offset = 0.0;
  double snap_distance = 0.0;
};

inline constexpr double kMaxSnapDistance = 500.0;

class RoadNetwork {
 public:
  RoadNetwork() = default;
  // Validates ids, self-loops, lengths and speeds.
  RoadNetwork(std::vector<NetworkNode> nodes, std::vector<Road> roads);

  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const std::vector<Road>& roads() const { return roads_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t node_count() const { return nodes_.size(); }

  int node_index(Id id) const;
  bool has_node(Id id) const { return index_.count(id) > 0; }
  int road_from(int road) const { return road_ends_[road].first; }
  int road_to(int road) const { return road_ends_[road].second; }
  // Arc along the road direction, and against it (-1 for one-way roads).
  int forward_arc(int road) const { return road_arcs_[road].first; }
  int backward_arc(int road) const { return road_arcs_[road].second; }

  const std::vector<int>& out_arcs(int node) const { return out_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }

  std::vector<double> freeflow_times() const;
  std::vector<double> lengths() const;
  double average_degree() const;

  // Nearest point on the nearest road. Throws when farther than kMaxSnapDistance.
  NetworkLocation snap(Point p, const std::string& what) const;
  NetworkLocation location_of_node(int node) const;

 private:
  std::vector<NetworkNode> nodes_;
  std::vector<Road> roads_;
  std::vector<Arc> arcs_;
  std::unordered_map<Id, int> index_;
  std::vector<std::pair<int, int>> road_ends_;
  std::vector<std::pair<int, int>> road_arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

enum class SearchMode {
  forward,     // cost of travelling from the origin
  backward,    // cost of travelling to the origin
  undirected,  // both directions of every road, arc cost taken from the forward arc
};

// Single-source search from a location. Arc costs are indexed by arc.
class ShortestPathTree {
 public:
  ShortestPathTree(const RoadNetwork& net, const NetworkLocation& origin, std::span<const double> arc_cost,
                   SearchMode mode, double cutoff = INFINITY);

  // Infinity when unreachable (or beyond the cutoff).
  double cost_to(const NetworkLocation& target) const;
  double cost_to_node(int node) const { return dist_[node]; }
  // Arcs used by the best path to `target`, including the partially travelled
  // arcs at both ends. Forward mode only.
  std::vector<int> path_arcs(const NetworkLocation& target) const;

 private:
  double arc_cost(int arc) const;
  const RoadNetwork* net_;
  NetworkLocation origin_;
  std::span<const double> cost_;
  SearchMode mode_;
  std::vector<double> dist_;
  std::vector<int> pred_;
  std::vector<int> first_arc_;
};

// Minimum directed travel time from a to b. `arc_times` defaults to free-flow.
double shortest_time(const RoadNetwork& net, const NetworkLocation& a, const NetworkLocation& b,
                     std::span<const double> arc_times = {});

// Network walking distance (undirected road lengths).
double walk_distance(const RoadNetwork& net, const NetworkLocation& a, const NetworkLocation& b);

struct Subgraph {
  std::vector<int> nodes;  // node indices, ascending
  std::vector<int> roads;  // road indices, ascending
  bool contains_node(int node) const;
  bool contains_location(const RoadNetwork& net, const NetworkLocation& loc) const;
};

// Nodes inside the region, roads with both ends inside, then the largest
// weakly connected component (ties: component holding the smallest node id).
Subgraph restrict_and_largest_component(const RoadNetwork& net, const Region& region);

// Indices of stops whose walking distance from `home` is within max_walk,
// with the distances.
struct StopReach {
  int stop = 0;
  double walk_m = 0.0;
};
std::vector<StopReach> walk_catchment(const RoadNetwork& net, const NetworkLocation& home,
                                      std::span<const NetworkLocation> stops, double max_walk,
                                      bool euclidean = false);

}  // namespace sbrsp
