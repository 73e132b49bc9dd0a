#include <algorithm>
#include <vector>

#include "doctest.h"
#include "sbrsp/error.hpp"
#include "sbrsp/milp/clustering_models.hpp"
#include "sbrsp/milp/solver.hpp"
#include "sbrsp/random.hpp"
#include "support/oracles.hpp"

using namespace sbrsp;
using namespace sbrsp::milp;

namespace {

SolveOptions exact() {
  SolveOptions o;
  o.mip_rel_gap = 0.0;
  o.mip_abs_gap = 0.0;
  return o;
}

}  // namespace

TEST_CASE("single integer variable with a lower bound") {
  MiloModel m("tiny");
  const int x = m.add_continuous("x", 0, 10);
  const int b = m.add_binary("b");
  m.add_constraint("lb", {{x, 1}}, Sense::ge, 3);
  m.add_constraint("link", {{x, 1}, {b, -10}}, Sense::le, 0);
  m.set_objective({{x, 1}, {b, 0.5}});
  for (const auto& id : backend_ids()) {
    SolveOptions o = exact();
    o.backend = id;
    const MiloSolution s = solve(m, o);
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(3.5));
    CHECK(s.values[x] == doctest::Approx(3));
    CHECK(s.values[b] == doctest::Approx(1));
    CHECK(m.check(s.values).empty());
  }
}

TEST_CASE("contradictory rows are infeasible") {
  MiloModel m("bad");
  const int x = m.add_continuous("x");
  m.add_constraint("lo", {{x, 1}}, Sense::ge, 5);
  m.add_constraint("hi", {{x, 1}}, Sense::le, 4);
  m.set_objective({{x, 1}});
  CHECK(solve(m, exact()).status == SolveStatus::infeasible);
}

TEST_CASE("model bookkeeping") {
  MiloModel m;
  const int a = m.add_binary("a");
  const int c = m.add_continuous("c", -1, 1);
  CHECK_THROWS_AS(m.add_binary("a"), Error);
  m.add_constraint("merged", {{a, 1}, {a, 2}, {c, 0}}, Sense::le, 3);
  REQUIRE(m.constraints().back().terms.size() == 1);
  CHECK(m.constraints().back().terms[0].coef == 3);
  CHECK(m.index("c") == c);
  CHECK_FALSE(m.find("zz").has_value());
  CHECK(m.binary_count() == 1);
  // Fractional binary and a broken row both reported.
  const auto v = m.check({0.5, 0.0});
  CHECK_FALSE(v.empty());
  CHECK(m.check({1.0, 0.5}).empty());
  CHECK(m.to_lp().find("General") != std::string::npos);
}

TEST_CASE("a feasible warm start is never beaten by a worse incumbent") {
  MiloModel m;
  const int x = m.add_continuous("x", 0, 4);
  m.set_objective({{x, 1}});
  m.set_warm_start({{"x", 0.0}});
  const MiloSolution s = solve(m, exact());
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("stop minimization on small covers") {
  auto solve_cover = [](int n, const std::vector<std::vector<int>>& c) {
    const MiloModel m = build_stop_min_model(n, c);
    const MiloSolution s = solve(m, exact());
    REQUIRE(s.status == SolveStatus::optimal);
    return static_cast<int>(std::lround(s.objective));
  };
  CHECK(solve_cover(3, {{0, 1}, {1, 2}, {2}}) == 2);
  CHECK(solve_cover(4, {{0}, {1}, {2}, {3}}) == 4);
  CHECK(solve_cover(3, {{0, 1}, {1}, {1, 2}, {1}}) == 1);
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + uniform_index(rng, 7);
    std::vector<std::vector<int>> c(1 + uniform_index(rng, 8));
    for (auto& row : c) {
      for (int i = 0; i < n; ++i) {
        if (bernoulli(rng, 0.35)) row.push_back(i);
      }
      if (row.empty()) row.push_back(uniform_index(rng, n));
    }
    CHECK(solve_cover(n, c) == sbrsp::testing::brute_force_cover(n, c));
  }
}

TEST_CASE("pair clustering of two students on one bus") {
  const std::vector<int> cap = {2};
  const std::vector<double> delta = {0, 5, 7, 0};
  const std::vector<int> free = {-1, -1};
  const MiloSolution s = solve(build_rna_kmeans_model(cap, delta, free), exact());
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(12.0));
  CHECK(rna_objective(std::vector<int>{0, 0}, delta) == doctest::Approx(12.0));
  CHECK(rna_objective(std::vector<int>{0, 1}, delta) == 0.0);
}

TEST_CASE("pair clustering matches enumeration of partitions") {
  Rng rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    const int S = 4 + uniform_index(rng, 2);
    const std::vector<int> cap = {3, 3};
    std::vector<Point> pts(S);
    for (auto& p : pts) p = {uniform(rng, 0, 100), uniform(rng, 0, 100)};
    std::vector<double> delta(S * S);
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) delta[a * S + b] = distance(pts[a], pts[b]);
    const std::vector<int> free(S, -1);
    const MiloSolution s = solve(build_rna_kmeans_model(cap, delta, free), exact());
    REQUIRE(s.has_values());
    double best = INFINITY;
    for (int mask = 0; mask < (1 << S); ++mask) {
      std::vector<int> bus(S);
      int on0 = 0;
      for (int i = 0; i < S; ++i) {
        bus[i] = (mask >> i) & 1;
        on0 += bus[i] == 0;
      }
      if (on0 < 1 || on0 > 3 || S - on0 < 1 || S - on0 > 3) continue;
      best = std::min(best, rna_objective(bus, delta));
    }
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("capacitated assignment step") {
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {10, 0}};
  const std::vector<Point> cen = {{0, 0}, {10, 0}};
  const std::vector<int> cap = {1, 2};
  const MiloModel m = build_assignment_step_model(pts, cen, cap);
  const MiloSolution s = solve(m, exact());
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(81.0));
  CHECK(s.values[m.index(cluster_names::z(1, 1))] == doctest::Approx(1.0));
}
