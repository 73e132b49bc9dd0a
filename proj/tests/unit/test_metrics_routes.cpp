#include <cmath>

#include "doctest.h"
#include "sbrsp/error.hpp"
#include "sbrsp/metrics.hpp"
#include "sbrsp/pipeline.hpp"
#include "support/tiny_instances.hpp"

using namespace sbrsp;

namespace {

struct Solved {
  Instance inst;
  RouteSolution sol;
};

Solved solve_tiny(std::uint64_t seed) {
  testing::TinySpec t;
  t.students = 6;
  t.max_stops = 4;
  for (std::uint64_t s = seed;; ++s) {
    auto inst = testing::tiny_instance(t, s);
    if (!inst) continue;
    Solved out{std::move(*inst), {}};
    const Scenario sc = make_scenario(out.inst, out.inst.status_quo_riders());
    auto opts = PipelineOptions::from_params(out.inst.params, 0);
    for (auto* o : {&opts.cluster_solve, &opts.stopmin_solve, &opts.reduced_solve, &opts.full_solve}) o->node_limit = 200;
    out.sol = run_hracssas4(sc, opts).solution;
    return out;
  }
}

}  // namespace

TEST_CASE("metrics totals add up and detours are at least one") {
  const auto s = solve_tiny(1);
  REQUIRE(s.sol.status() == "ok");
  const Scenario sc = make_scenario(s.inst, s.inst.status_quo_riders());
  MetricsInputs in;
  const auto m = compute_metrics(sc, s.sol, in);
  double brts = 0.0, stt = 0.0;
  for (const auto& st : m.students) {
    brts += st.brts_s / 60.0;
    stt += st.stt_s / 60.0;
    CHECK(st.detour_ratio >= 1.0 - 1e-9);
    CHECK(st.pickup_order > 0.0);
    CHECK(st.pickup_order <= 1.0);
  }
  CHECK(m.total_brts_min == doctest::Approx(brts));
  CHECK(m.total_stt_min == doctest::Approx(stt));
  CHECK(m.total_brts_min * 60.0 == doctest::Approx(s.sol.total_ride_time));
  CHECK(m.utilization > 0.0);
  CHECK(m.utilization <= 1.0);

  // Walking speed moves STT but never BRTS.
  MetricsInputs slow;
  slow.walk_speed_mps = 0.5;
  const auto m2 = compute_metrics(sc, s.sol, slow);
  CHECK(m2.total_brts_min == m.total_brts_min);
  CHECK(m2.total_stt_min >= m.total_stt_min);
}

TEST_CASE("metrics reject a solution whose legs disagree with the routes") {
  auto s = solve_tiny(1);
  REQUIRE(s.sol.status() == "ok");
  const Scenario sc = make_scenario(s.inst, s.inst.status_quo_riders());
  s.sol.legs.front().pick_time += 5.0;
  CHECK_THROWS_AS(compute_metrics(sc, s.sol, {}), Error);
  auto dropped = solve_tiny(1);
  dropped.sol.legs.pop_back();
  CHECK_THROWS_AS(compute_metrics(sc, dropped.sol, {}), Error);
}
