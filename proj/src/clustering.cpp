#include "sbrsp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbrsp/error.hpp"
#include "sbrsp/milp/clustering_models.hpp"
#include "sbrsp/random.hpp"

namespace sbrsp {

namespace cn = milp::cluster_names;

std::vector<int> ClusterAssignment::members(int bus) const {
  std::vector<int> out;
  for (std::size_t s = 0; s < bus_of.size(); ++s) {
    if (bus_of[s] == bus) out.push_back(static_cast<int>(s));
  }
  return out;
}

std::vector<Point> rider_points(const Scenario& sc) {
  std::vector<Point> pts;
  pts.reserve(sc.riders.size());
  for (int s : sc.riders) pts.push_back(sc.inst().students[s].position);
  return pts;
}

std::vector<int> clustering_capacities(const Instance& inst) {
  std::vector<int> caps;
  for (const auto& b : inst.buses) caps.push_back(b.clustering_capacity());
  return caps;
}

namespace {

std::vector<Point> kmeanspp_seeds(const std::vector<Point>& pts, int k, Rng& rng) {
  const std::size_t S = pts.size();
  std::vector<char> chosen(S, 0);
  std::vector<Point> seeds;
  std::vector<double> d2(S, INFINITY);
  std::size_t first = static_cast<std::size_t>(uniform_index(rng, static_cast<int>(S)));
  for (int c = 0; c < k; ++c) {
    std::size_t pick = first;
    if (c > 0) {
      double total = 0.0;
      for (std::size_t s = 0; s < S; ++s) total += chosen[s] ? 0.0 : d2[s];
      if (total <= 0.0) {
        std::vector<std::size_t> open;
        for (std::size_t s = 0; s < S; ++s) {
          if (!chosen[s]) open.push_back(s);
        }
        pick = open[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(open.size())))];
      } else {
        double target = uniform01(rng) * total;
        pick = S;
        for (std::size_t s = 0; s < S; ++s) {
          if (chosen[s]) continue;
          pick = s;
          target -= d2[s];
          if (target < 0.0) break;
        }
      }
    }
    chosen[pick] = 1;
    seeds.push_back(pts[pick]);
    for (std::size_t s = 0; s < S; ++s) d2[s] = std::min(d2[s], squared_distance(pts[s], pts[pick]));
  }
  return seeds;
}

std::vector<Point> centroids_of(const std::vector<Point>& pts, const std::vector<int>& bus_of, int K) {
  std::vector<Point> c(K);
  std::vector<int> count(K, 0);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    c[bus_of[s]].x += pts[s].x;
    c[bus_of[s]].y += pts[s].y;
    count[bus_of[s]] += 1;
  }
  for (int k = 0; k < K; ++k) {
    if (count[k] > 0) {
      c[k].x /= count[k];
      c[k].y /= count[k];
    }
  }
  return c;
}

std::vector<Region> hulls(const std::vector<Point>& pts, const std::vector<int>& bus_of, int K) {
  std::vector<std::vector<Point>> groups(K);
  for (std::size_t s = 0; s < pts.size(); ++s) groups[bus_of[s]].push_back(pts[s]);
  std::vector<Region> out;
  for (int k = 0; k < K; ++k) {
    if (groups[k].empty()) throw Error(ErrorKind::capacity, "bus " + std::to_string(k) + " has no students");
    out.push_back(convex_hull(groups[k]));
  }
  return out;
}

void check_capacity(const Scenario& sc) {
  const auto caps = clustering_capacities(sc.inst());
  long total = 0;
  for (int c : caps) total += c;
  const long S = static_cast<long>(sc.riders.size());
  if (total < S) {
    throw Error(ErrorKind::capacity,
                "clustering capacity " + std::to_string(total) + " is below " + std::to_string(S) + " riders");
  }
  if (static_cast<long>(caps.size()) > S) {
    throw Error(ErrorKind::capacity, std::to_string(caps.size()) + " buses but only " + std::to_string(S) +
                                         " riders; every bus needs at least one student");
  }
}

}  // namespace

ClusterAssignment euclidean_constrained_kmeans(const Scenario& sc, const PipelineOptions& opts) {
  check_capacity(sc);
  const auto pts = rider_points(sc);
  const auto caps = clustering_capacities(sc.inst());
  const int K = static_cast<int>(caps.size());
  const int S = static_cast<int>(pts.size());
  const auto& params = sc.inst().params;

  Rng rng(opts.seed);
  ClusterAssignment ca;
  ca.centroids = kmeanspp_seeds(pts, K, rng);
  for (int iter = 1; iter <= params.kmeans_max_iterations; ++iter) {
    auto model = milp::build_assignment_step_model(pts, ca.centroids, caps);
    if (!ca.bus_of.empty()) {
      milp::ValueMap warm;
      for (int s = 0; s < S; ++s) warm[cn::z(s, ca.bus_of[s])] = 1.0;
      model.set_warm_start(std::move(warm));
    }
    const auto sol = milp::solve(model, opts.cluster_solve);
    if (!sol.has_values()) {
      throw Error(ErrorKind::no_solution, "assignment step ended with status " + std::string(milp::status_name(sol.status)));
    }
    std::vector<int> bus_of(S, -1);
    for (int s = 0; s < S; ++s) {
      for (int k = 0; k < K; ++k) {
        if (sol.values[model.index(cn::z(s, k))] > 0.5) bus_of[s] = k;
      }
    }
    ca.bus_of = std::move(bus_of);
    const auto next = centroids_of(pts, ca.bus_of, K);
    double shift = 0.0;
    for (int k = 0; k < K; ++k) shift = std::max(shift, squared_distance(next[k], ca.centroids[k]));
    ca.centroids = next;
    ca.kmeans_iterations = iter;
    if (shift <= params.cluster_eps_m2) {
      ca.kmeans_converged = true;
      break;
    }
  }
  ca.kmeans_objective = 0.0;
  for (int s = 0; s < S; ++s) ca.kmeans_objective += squared_distance(pts[s], ca.centroids[ca.bus_of[s]]);
  ca.regions = hulls(pts, ca.bus_of, K);
  return ca;
}

ClusterAssignment compute_free_students(ClusterAssignment ca, const Scenario& sc) {
  const auto pts = rider_points(sc);
  const int K = ca.bus_count();
  const int S = static_cast<int>(pts.size());
  const auto& net = sc.inst().network;
  ca.regions = hulls(pts, ca.bus_of, K);
  ca.overlap.assign(K, {});
  ca.interior.assign(K, {});
  ca.connected.assign(K, {});
  for (int k = 0; k < K; ++k) {
    const Subgraph core = restrict_and_largest_component(net, ca.regions[k]);
    for (int s : ca.members(k)) {
      bool shared = false;
      for (int j = 0; j < K && !shared; ++j) shared = j != k && contains(ca.regions[j], pts[s]);
      if (shared) {
        ca.overlap[k].push_back(s);
        continue;
      }
      ca.interior[k].push_back(s);
      if (core.contains_location(net, sc.inst().students[sc.riders[s]].home)) ca.connected[k].push_back(s);
    }
  }
  std::vector<char> fixed(S, 0);
  for (const auto& group : ca.connected) {
    for (int s : group) fixed[s] = 1;
  }
  ca.free_students.clear();
  for (int s = 0; s < S; ++s) {
    if (!fixed[s]) ca.free_students.push_back(s);
  }
  return ca;
}

std::vector<double> student_pair_times(const Scenario& sc, const std::vector<int>& needed) {
  const std::size_t S = sc.riders.size();
  std::vector<double> delta(S * S, NAN);
  std::vector<int> rows = needed;
  if (rows.empty()) {
    for (std::size_t s = 0; s < S; ++s) rows.push_back(static_cast<int>(s));
  }
  const auto& inst = sc.inst();
  auto home = [&](std::size_t s) { return inst.students[sc.riders[s]].home; };
  for (int a : rows) {
    ShortestPathTree fwd(inst.network, home(a), sc.arc_times, SearchMode::forward);
    ShortestPathTree bwd(inst.network, home(a), sc.arc_times, SearchMode::backward);
    for (std::size_t b = 0; b < S; ++b) {
      if (static_cast<std::size_t>(a) == b) {
        delta[a * S + b] = 0.0;
        continue;
      }
      const double there = fwd.cost_to(home(b));
      const double back = bwd.cost_to(home(b));
      if (!std::isfinite(there) || !std::isfinite(back)) {
        throw Error(ErrorKind::disconnected, "no road path between the homes of students " +
                                                 std::to_string(inst.students[sc.riders[a]].id) + " and " +
                                                 std::to_string(inst.students[sc.riders[b]].id));
      }
      delta[a * S + b] = there;
      delta[b * S + a] = back;
    }
  }
  return delta;
}

ClusterAssignment reduced_rna_kmeans(ClusterAssignment ca, const Scenario& sc, const PipelineOptions& opts) {
  check_capacity(sc);
  const auto pts = rider_points(sc);
  const auto caps = clustering_capacities(sc.inst());
  const int K = static_cast<int>(caps.size());
  const int S = static_cast<int>(pts.size());
  const bool warm = !ca.bus_of.empty();
  if (!warm) {
    ca.free_students.resize(S);
    for (int s = 0; s < S; ++s) ca.free_students[s] = s;
    ca.connected.assign(K, {});
  }
  if (ca.free_students.empty()) {
    ca.rna_objective_before = 0.0;
    ca.rna_objective_after = 0.0;
    ca.rna_status = "Optimal";
    ca.regions = hulls(pts, ca.bus_of, K);
    return ca;
  }
  std::vector<int> fixed_bus(S, -1);
  for (int k = 0; k < K && k < static_cast<int>(ca.connected.size()); ++k) {
    for (int s : ca.connected[k]) fixed_bus[s] = k;
  }
  const auto delta = student_pair_times(sc, ca.free_students);
  auto model = milp::build_rna_kmeans_model(caps, delta, fixed_bus);
  if (warm) {
    milp::ValueMap start;
    for (int s = 0; s < S; ++s) start[cn::y(s, ca.bus_of[s])] = 1.0;
    for (int s : ca.free_students) {
      for (int s2 = 0; s2 < S; ++s2) {
        if (s2 != s && ca.bus_of[s] == ca.bus_of[s2]) {
          start[cn::x(s, s2, ca.bus_of[s])] = 1.0;
          start[cn::x(s2, s, ca.bus_of[s])] = 1.0;
        }
      }
    }
    model.set_warm_start(start);
    ca.rna_objective_before = model.evaluate(model.dense(start));
  }
  const auto sol = milp::solve(model, opts.cluster_solve);
  ca.rna_status = std::string(milp::status_name(sol.status));
  if (!sol.has_values()) {
    throw Error(ErrorKind::no_solution, "road-network-aware clustering ended with status " + *ca.rna_status);
  }
  std::vector<int> bus_of(S, -1);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      if (sol.values[model.index(cn::y(s, k))] > 0.5) bus_of[s] = k;
    }
  }
  ca.bus_of = std::move(bus_of);
  ca.rna_objective_after = sol.objective;
  ca.centroids = centroids_of(pts, ca.bus_of, K);
  ca.regions = hulls(pts, ca.bus_of, K);
  return ca;
}

ClusterAssignment assign_stops_to_clusters(ClusterAssignment ca, const Scenario& sc) {
  const auto& inst = sc.inst();
  const int K = ca.bus_count();
  if (static_cast<int>(ca.regions.size()) != K) ca.regions = hulls(rider_points(sc), ca.bus_of, K);
  ca.expanded.clear();
  ca.stops.assign(K, {});
  for (int k = 0; k < K; ++k) {
    ca.expanded.push_back(expand_region(ca.regions[k], inst.params.max_walk_m));
    for (std::size_t i = 0; i < inst.stops.size(); ++i) {
      if (contains(ca.expanded[k], inst.stops[i].position)) ca.stops[k].push_back(static_cast<int>(i));
    }
    for (int s : ca.members(k)) {
      const int student = sc.riders[s];
      bool reachable = false;
      for (const auto& reach : inst.catchments[student]) {
        reachable = reachable || std::binary_search(ca.stops[k].begin(), ca.stops[k].end(), reach.stop);
      }
      if (!reachable) {
        const Id id = inst.students[student].id;
        throw Error(ErrorKind::stranded_student,
                    "student " + std::to_string(id) + " has no reachable stop inside the service region of bus " +
                        std::to_string(inst.buses[k].id),
                    "student " + std::to_string(id));
      }
    }
  }
  return ca;
}

ClusterAssignment run_clustering(const Scenario& sc, const PipelineOptions& opts) {
  const auto& f = opts.features;
  ClusterAssignment ca;
  if (!f.euclidean_kmeans) {
    ca.centroids.assign(sc.inst().buses.size(), Point{});
    ca = reduced_rna_kmeans(std::move(ca), sc, opts);
  } else {
    ca = euclidean_constrained_kmeans(sc, opts);
    if (f.road_network_awareness) {
      if (f.size_reduction) {
        ca = compute_free_students(std::move(ca), sc);
      } else {
        const int S = static_cast<int>(sc.riders.size());
        ca.free_students.resize(S);
        for (int s = 0; s < S; ++s) ca.free_students[s] = s;
        ca.connected.assign(ca.bus_count(), {});
      }
      ca = reduced_rna_kmeans(std::move(ca), sc, opts);
    }
  }
  return assign_stops_to_clusters(std::move(ca), sc);
}

}  // namespace sbrsp
