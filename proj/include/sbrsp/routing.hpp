#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbrsp/clustering.hpp"
#include "sbrsp/milp/routing_model.hpp"
#include "sbrsp/options.hpp"
#include "sbrsp/scenario.hpp"

namespace sbrsp {

// A routing problem cut out of a scenario, with maps back to instance indices.
struct LocalProblem {
  RoutingProblem problem;
  std::vector<int> buses;        // instance bus index per local bus
  std::vector<int> stop_index;   // instance stop index per local stop
  std::vector<int> school_index; // instance school index per local school
  std::vector<int> rider_index;  // instance student index per local rider
};

// One bus, the riders clustered on it and the stops of its expanded region.
LocalProblem make_cluster_problem(const Scenario& sc, const ClusterAssignment& ca, int bus);
// Every bus and rider; stops limited to those some rider can walk to.
LocalProblem make_full_problem(const Scenario& sc);

struct StageReport {
  std::string status;  // solver status name, "skipped" when the stage did not run
  double objective = NAN;
  double best_bound = NAN;
  double wall_time_s = 0.0;
};

struct PreassignResult {
  StopPreassignment pre;
  StageReport report;
};

// Minimum stop cover; each student goes to the nearest selected stop of its
// catchment (walk distance, then stop id).
PreassignResult stop_min_preassign(const RoutingProblem& p, const milp::SolveOptions& opts);

struct RoutingResult {
  std::vector<Tour> tours;
  milp::ValueMap values;
  StageReport report;
};

// Reduced single-bus solve. `pre` may be null when pre-assignment is
// switched off. Throws infeasible or no_solution errors.
RoutingResult solve_reduced_routing(const RoutingProblem& p, const StopPreassignment* pre, const FeatureFlags& features,
                                    const milp::SolveOptions& opts);

struct LiftResult {
  milp::ValueMap values;
  bool ok = false;
  double objective = NAN;  // ride time under the full model
  std::vector<milp::Violation> violations;
  std::string reason;
};

// Full-model values for reduced tours, with recomputed waiting-inclusive times.
LiftResult lift_to_warm_start(const RoutingProblem& p, const std::vector<Tour>& tours);

// Single- or multi-bus full model, optionally warm-started.
RoutingResult solve_full_routing(const RoutingProblem& p, const milp::ValueMap* warm, const milp::SolveOptions& opts);

struct RouteVisit {
  bool is_school = false;
  int index = 0;  // instance stop or school index
  Id id = 0;
  double time = 0.0;
  int boarded = 0;
  int alighted = 0;
  int load_after = 0;
};

struct StudentLeg {
  int student = 0;  // instance index
  Id student_id = 0;
  Id bus_id = 0;
  Id stop_id = 0;
  Id school_id = 0;
  double pick_time = 0.0;
  double drop_time = 0.0;
  double walk_m = 0.0;
};

struct ClusterStages {
  int riders = 0;
  int candidate_stops = 0;
  StageReport stopmin;
  int selected_stops = 0;
  StageReport reduced;
  bool lift_failed = false;
  std::string lift_reason;
  double lifted_objective = NAN;
  StageReport full;
  bool warm_start_kept = false;
};

struct BusRoute {
  int bus = 0;  // instance index
  Id bus_id = 0;
  std::string status = "ok";  // ok | Infeasible | No sol.
  std::string message;
  std::vector<RouteVisit> visits;
  double end_time = 0.0;
  double ride_time = 0.0;
  ClusterStages stages;
};

struct RouteSolution {
  std::string pipeline;
  std::vector<BusRoute> routes;  // one per bus
  std::vector<StudentLeg> legs;  // ascending student index
  double total_ride_time = 0.0;

  // ok, Infeasible (some bus infeasible), No sol. (no bus solved) or
  // No sol.* (some bus without a solution).
  std::string status() const;
  // Throws the first failing bus's error.
  void require_ok() const;
};

struct ClusterOutcome {
  BusRoute route;
  std::vector<StudentLeg> legs;
};

// Routes one cluster through the stages enabled in `opts.features`.
ClusterOutcome route_cluster(const Scenario& sc, const ClusterAssignment& ca, int bus, const PipelineOptions& opts);
RouteSolution route_all_clusters(const Scenario& sc, const ClusterAssignment& ca, const PipelineOptions& opts);

// Visits, times and student legs of one local tour.
void fill_route(const Scenario& sc, const LocalProblem& lp, const Tour& tour, BusRoute& route,
                std::vector<StudentLeg>& legs);

// Checks a multi-bus solution against the full model over every rider and bus.
std::vector<milp::Violation> validate_route_solution(const Scenario& sc, const RouteSolution& sol);

}  // namespace sbrsp
