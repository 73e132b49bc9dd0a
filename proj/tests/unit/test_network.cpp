#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sbrsp/error.hpp"
#include "sbrsp/network.hpp"
#include "sbrsp/random.hpp"
#include "sbrsp/travel_matrix.hpp"

using namespace sbrsp;

namespace {

// Random connected graph: a spanning tree plus extra roads, some one-way.
RoadNetwork random_network(Rng& rng, int n, int extra) {
  std::vector<NetworkNode> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i + 1, {uniform(rng, 0, 2000), uniform(rng, 0, 2000)}});
  std::vector<Road> roads;
  std::set<std::pair<int, int>> used;
  auto add = [&](int a, int b, bool oneway) {
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) return;
    used.insert({std::min(a, b), std::max(a, b)});
    const double len = distance(nodes[a].pos, nodes[b].pos) * uniform(rng, 1.0, 1.4) + 1.0;
    roads.push_back({nodes[a].id, nodes[b].id, len, uniform(rng, 8, 25), std::nullopt, oneway});
  };
  for (int i = 1; i < n; ++i) add(i, uniform_index(rng, i), false);
  for (int e = 0; e < extra; ++e) add(uniform_index(rng, n), uniform_index(rng, n), bernoulli(rng, 0.3));
  return RoadNetwork(nodes, roads);
}

// All-pairs node times by Floyd-Warshall.
std::vector<std::vector<double>> floyd(const RoadNetwork& net, bool undirected_lengths) {
  const int n = static_cast<int>(net.node_count());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, INFINITY));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& a : net.arcs()) {
    const double c = undirected_lengths ? a.length_m : a.freeflow_time();
    d[a.tail][a.head] = std::min(d[a.tail][a.head], c);
    if (undirected_lengths) d[a.head][a.tail] = std::min(d[a.head][a.tail], c);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

TEST_CASE("path of two roads adds their times") {
  RoadNetwork net({{1, {0, 0}}, {2, {100, 0}}, {3, {200, 0}}},
                  {{1, 2, 100.0, 10.0, std::nullopt, false}, {2, 3, 100.0, 10.0, std::nullopt, false}});
  const auto a = net.location_of_node(net.node_index(1));
  const auto c = net.location_of_node(net.node_index(3));
  CHECK(shortest_time(net, a, c) == doctest::Approx(20.0));
  CHECK(shortest_time(net, a, a) == 0.0);
  CHECK(walk_distance(net, c, a) == doctest::Approx(200.0));
}

TEST_CASE("network construction rejects bad roads") {
  CHECK_THROWS_AS(RoadNetwork({{1, {0, 0}}}, {{1, 1, 10.0, 10.0, std::nullopt, false}}), Error);
  CHECK_THROWS_AS(RoadNetwork({{1, {0, 0}}, {2, {1, 0}}}, {{1, 3, 10.0, 10.0, std::nullopt, false}}), Error);
  CHECK_THROWS_AS(RoadNetwork({{1, {0, 0}}, {2, {1, 0}}}, {{1, 2, -1.0, 10.0, std::nullopt, false}}), Error);
}

TEST_CASE("node-to-node times match Floyd-Warshall on random graphs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const RoadNetwork net = random_network(rng, 20, 10);
    const auto d = floyd(net, false);
    const auto w = floyd(net, true);
    for (int q = 0; q < 5; ++q) {
      const int i = uniform_index(rng, 20), j = uniform_index(rng, 20);
      const auto a = net.location_of_node(i), b = net.location_of_node(j);
      REQUIRE(std::isfinite(d[i][j]));  // the spanning tree is two-way
      CHECK(shortest_time(net, a, b) == doctest::Approx(d[i][j]).epsilon(1e-12));
      CHECK(walk_distance(net, a, b) == doctest::Approx(w[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mid-road locations split the road time") {
  RoadNetwork net({{1, {0, 0}}, {2, {100, 0}}, {3, {100, 100}}},
                  {{1, 2, 100.0, 10.0, std::nullopt, false}, {2, 3, 100.0, 5.0, std::nullopt, true}});
  const auto mid = net.snap({50, 3}, "p");
  CHECK(mid.snap_distance == doctest::Approx(3.0));
  const auto top = net.location_of_node(net.node_index(3));
  CHECK(shortest_time(net, mid, top) == doctest::Approx(5.0 + 20.0));
  CHECK_THROWS_AS(shortest_time(net, top, mid), Error);  // one-way road
  CHECK_THROWS_AS(net.snap({5000, 5000}, "far"), Error);
}

TEST_CASE("largest component inside a region") {
  // Components {1..5} and {6..8}, joined by a road that leaves the region.
  std::vector<NetworkNode> nodes;
  for (int i = 1; i <= 5; ++i) nodes.push_back({i, {i * 10.0, 0}});
  for (int i = 6; i <= 8; ++i) nodes.push_back({i, {i * 10.0, 50}});
  nodes.push_back({9, {500, 500}});
  std::vector<Road> roads;
  for (int i = 1; i < 5; ++i) roads.push_back({i, i + 1, 10, 10, std::nullopt, false});
  roads.push_back({6, 7, 10, 10, std::nullopt, false});
  roads.push_back({7, 8, 10, 10, std::nullopt, false});
  roads.push_back({5, 9, 10, 10, std::nullopt, false});
  roads.push_back({9, 6, 10, 10, std::nullopt, false});
  const RoadNetwork net(nodes, roads);

  Region box;
  box.shape = RegionShape::polygon;
  box.ring = {{0, -10}, {100, -10}, {100, 60}, {0, 60}};
  const Subgraph g = restrict_and_largest_component(net, box);
  std::vector<Id> ids;
  for (int n : g.nodes) ids.push_back(net.nodes()[n].id);
  CHECK(ids == std::vector<Id>{1, 2, 3, 4, 5});
  CHECK(g.roads.size() == 4);

  Region all = box;
  all.ring = {{-1, -100}, {1000, -100}, {1000, 1000}, {-1, 1000}};
  CHECK(restrict_and_largest_component(net, all).nodes.size() == 9);

  Region empty = box;
  empty.ring = {{2000, 2000}, {2100, 2000}, {2100, 2100}, {2000, 2100}};
  CHECK(restrict_and_largest_component(net, empty).nodes.empty());
}

TEST_CASE("walk catchment along a straight road") {
  RoadNetwork net({{1, {-100, 0}}, {2, {1000, 0}}}, {{1, 2, 1100.0, 10.0, std::nullopt, false}});
  const auto home = net.snap({0, 0}, "home");
  const std::vector<NetworkLocation> stops = {net.snap({400, 0}, "a"), net.snap({600, 0}, "b"), net.snap({0, 0}, "c")};
  const auto reach = walk_catchment(net, home, stops, 482.8032);
  REQUIRE(reach.size() == 2);
  std::vector<int> idx = {reach[0].stop, reach[1].stop};
  std::sort(idx.begin(), idx.end());
  CHECK(idx == std::vector<int>{0, 2});
  for (const auto& r : reach) CHECK(r.walk_m == doctest::Approx(r.stop == 0 ? 400.0 : 0.0));
}

TEST_CASE("walk catchment matches a threshold on all-pairs walking distances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 100);
    const RoadNetwork net = random_network(rng, 15, 8);
    const auto w = floyd(net, true);
    std::vector<NetworkLocation> stops;
    for (int i = 0; i < 15; ++i) stops.push_back(net.location_of_node(i));
    const int home = uniform_index(rng, 15);
    const double limit = uniform(rng, 200, 1500);
    const auto reach = walk_catchment(net, net.location_of_node(home), stops, limit);
    std::set<int> got;
    for (const auto& r : reach) got.insert(r.stop);
    for (int i = 0; i < 15; ++i) {
      if (std::abs(w[home][i] - limit) < 1e-6) continue;
      CHECK(got.count(i) == (w[home][i] <= limit ? 1u : 0u));
    }
  }
}

TEST_CASE("travel matrix arc sets and entries") {
  const TravelTimeMatrix one(1, 1, {0, 7, 9, 0});
  CHECK(one.arcs(ArcClass::origin_stop).size() == 1);
  CHECK(one.arcs(ArcClass::stop_school).size() == 1);
  CHECK(one.arcs(ArcClass::school_dest).size() == 1);
  CHECK(one(one.origin(), one.stop(0)) == 0.0);
  CHECK(one(one.stop(0), one.school(0)) == 7.0);
  CHECK(one(one.school(0), one.destination()) == 0.0);

  const TravelTimeMatrix two(2, 2, std::vector<double>(16, 1.0));
  CHECK(two.arcs(ArcClass::stop_stop).size() == 2);
  CHECK(two.arcs(ArcClass::stop_school).size() == 4);
  CHECK(two.arcs(ArcClass::school_school).size() == 2);
  CHECK(two.arcs(ArcClass::school_stop).size() == 4);
  CHECK(two.supply(two.origin()) == 1);
  CHECK(two.supply(two.destination()) == -1);
}

TEST_CASE("stop-to-school matrix entries equal shortest times") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed + 500);
    RoadNetwork net = random_network(rng, 12, 12);
    // Keep every pair reachable: drop one-way roads.
    std::vector<Road> roads = net.roads();
    for (auto& r : roads) r.oneway = false;
    net = RoadNetwork(net.nodes(), roads);
    std::vector<NetworkLocation> stops, schools;
    for (int i = 0; i < 3; ++i) {
      const Point at = net.nodes()[uniform_index(rng, 12)].pos;
      stops.push_back(net.snap({at.x + uniform(rng, -30, 30), at.y + uniform(rng, -30, 30)}, "s"));
    }
    for (int i = 0; i < 2; ++i) schools.push_back(net.location_of_node(uniform_index(rng, 12)));
    const auto D = build_travel_matrix(net, stops, schools);
    for (int i = 0; i < 3; ++i) {
      for (int m = 0; m < 2; ++m) {
        CHECK(D(D.stop(i), D.school(m)) == doctest::Approx(shortest_time(net, stops[i], schools[m])));
      }
    }
  }
}
