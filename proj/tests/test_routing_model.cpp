#include <cmath>

#include "doctest.h"
#include "routing_fixtures.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/milp/routing_model.hpp"
#include "sbrsp/milp/solver.hpp"

using namespace sbrsp;
using fixtures::make_problem;
using fixtures::rider;

namespace {

milp::SolveOptions exact() {
  milp::SolveOptions o;
  o.mip_rel_gap = 0.0;
  o.mip_abs_gap = 1e-9;
  o.time_limit_s = 60;
  return o;
}

}  // namespace

TEST_CASE("one student forced route") {
  auto D = fixtures::euclid_matrix({{0, 0}}, {{1000, 0}});
  auto p = make_problem(D, {rider(1, 0, {0})}, {5}, 4020);
  auto model = build_full_model(p);
  CHECK(model.find("e_n100_s1_k1"));
  CHECK(model.find("x_O_n100_k1"));
  CHECK(model.find("x_n100_m500_k1"));
  CHECK(model.find("x_m500_D_k1"));
  CHECK(model.find("x_m500_n100_k1"));
  auto sol = milp::solve(model, exact());
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(10 + 2 * 1 + 100.0));
  auto vals = model.to_map(sol.values);
  CHECK(validate_solution(p, full_variant(), vals).empty());

  p.board_intercept = 0;
  p.board_slope = 0;
  auto sol0 = milp::solve(build_full_model(p), exact());
  CHECK(sol0.objective == doctest::Approx(100.0));
}

TEST_CASE("canonical tour values satisfy the full model") {
  auto D = fixtures::euclid_matrix({{0, 0}, {300, 0}}, {{1000, 0}, {1200, 400}});
  auto p = make_problem(D, {rider(1, 0, {0}), rider(2, 1, {1}), rider(3, 1, {0, 1})}, {5}, 0);
  p.max_time = fixtures::generous_T(p);
  Tour tour{0, {D.stop(0), D.stop(1), D.school(0), D.school(1)}, {0, 1, 1}};
  auto sch = schedule_tour(p, tour);
  REQUIRE(sch.feasible);
  auto vals = tour_values(p, {tour});
  auto model = build_full_model(p);
  CHECK(model.check(model.dense(vals)).empty());
  CHECK(validate_solution(p, full_variant(), vals).empty());
  CHECK(model.evaluate(model.dense(vals)) == doctest::Approx(sch.ride_time));
  CHECK(ride_time_objective(p, vals) == doctest::Approx(sch.ride_time));

  SUBCASE("corrupted load is reported") {
    vals[names::w(p, D.stop(1), D.school(0), 0)] += 1.0;
    auto bad = validate_solution(p, full_variant(), vals);
    REQUIRE_FALSE(bad.empty());
    bool load = false;
    for (const auto& v : bad) load = load || v.constraint.find("load") != std::string::npos;
    CHECK(load);
  }
}

TEST_CASE("stranded rider rejected before solve") {
  auto D = fixtures::euclid_matrix({{0, 0}}, {{1000, 0}});
  auto p = make_problem(D, {rider(1, 0, {})}, {5}, 4020);
  try {
    build_full_model(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::stranded_student);
    CHECK(e.subject() == "student 1");
  }
}
