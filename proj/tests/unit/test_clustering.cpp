#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "sbrsp/clustering.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/milp/clustering_models.hpp"
#include "support/hand_instances.hpp"
#include "support/tiny_instances.hpp"

using namespace sbrsp;

namespace {

PipelineOptions quick(const Instance& inst, std::uint64_t seed = 0) {
  auto o = PipelineOptions::from_params(inst.params, seed);
  for (auto* s : {&o.cluster_solve, &o.stopmin_solve, &o.reduced_solve, &o.full_solve}) s->node_limit = 500;
  return o;
}

}  // namespace

TEST_CASE("k-means on four points in two pairs") {
  const Instance inst = testing::line_instance({0.0, 1.0, 10.0, 11.0}, 2, 2);
  const Scenario sc = make_scenario(inst, {0, 1, 2, 3});
  const auto ca = euclidean_constrained_kmeans(sc, quick(inst));
  CHECK(ca.kmeans_objective == 1.0);
  CHECK(ca.bus_of[0] == ca.bus_of[1]);
  CHECK(ca.bus_of[2] == ca.bus_of[3]);
  CHECK(ca.bus_of[0] != ca.bus_of[2]);
  std::vector<double> cx = {ca.centroids[0].x, ca.centroids[1].x};
  std::sort(cx.begin(), cx.end());
  CHECK(cx[0] == 0.5);
  CHECK(cx[1] == 10.5);
}

TEST_CASE("k-means with one seat per bus puts every student alone") {
  const Instance inst = testing::line_instance({0.0, 40.0, 90.0}, 3, 1);
  const Scenario sc = make_scenario(inst, {0, 1, 2});
  const auto ca = euclidean_constrained_kmeans(sc, quick(inst));
  CHECK(ca.kmeans_objective == 0.0);
  std::vector<int> b = ca.bus_of;
  std::sort(b.begin(), b.end());
  CHECK(b == std::vector<int>{0, 1, 2});
}

TEST_CASE("two students at one point share a bus at zero cost") {
  const Instance inst = testing::line_instance({5.0, 5.0}, 1, 2);
  const Scenario sc = make_scenario(inst, {0, 1});
  CHECK(euclidean_constrained_kmeans(sc, quick(inst)).kmeans_objective == 0.0);
}

TEST_CASE("clustering rejects a fleet without enough seats") {
  const Instance inst = testing::line_instance({0.0, 1.0, 2.0}, 1, 2);
  const Scenario sc = make_scenario(inst, {0, 1, 2});
  try {
    euclidean_constrained_kmeans(sc, quick(inst));
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}

TEST_CASE("pair objective sums ordered pairs inside each cluster") {
  // Three students, times 1..6 off the diagonal.
  const std::vector<double> delta = {0, 1, 2, 3, 0, 4, 5, 6, 0};
  const std::vector<int> bus_of = {0, 0, 1};
  CHECK(milp::rna_objective(bus_of, delta) == 1.0 + 3.0);
  const std::vector<int> together = {0, 0, 0};
  CHECK(milp::rna_objective(together, delta) == 21.0);
}

TEST_CASE("clustering phase keeps a capacity-feasible partition and its pinned students") {
  testing::TinySpec t;
  t.students = 12;
  t.buses = 3;
  t.max_stops = 10;
  t.area_km = 2.5;
  t.nodes = 20;
  int runs = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = testing::tiny_instance(t, seed);
    if (!inst) continue;
    runs += 1;
    const Scenario sc = make_scenario(*inst, inst->status_quo_riders());
    const auto opts = quick(*inst, seed);
    const auto base = compute_free_students(euclidean_constrained_kmeans(sc, opts), sc);
    const auto ca = reduced_rna_kmeans(base, sc, opts);
    const auto caps = clustering_capacities(*inst);
    std::vector<int> load(inst->buses.size(), 0);
    for (int b : ca.bus_of) {
      REQUIRE(b >= 0);
      REQUIRE(b < static_cast<int>(load.size()));
      load[b] += 1;
    }
    for (std::size_t k = 0; k < load.size(); ++k) {
      CHECK(load[k] >= 1);
      CHECK(load[k] <= caps[k]);
    }
    std::vector<char> is_free(sc.riders.size(), 0);
    for (int s : base.free_students) is_free[s] = 1;
    for (std::size_t s = 0; s < sc.riders.size(); ++s) {
      if (!is_free[s]) CHECK(ca.bus_of[s] == base.bus_of[s]);
    }
    if (ca.rna_objective_before) CHECK(*ca.rna_objective_after <= *ca.rna_objective_before + 1e-6);
  }
  CHECK(runs >= 5);
}
