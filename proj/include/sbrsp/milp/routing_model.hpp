#pragma once

#include <string>
#include <vector>

#include "sbrsp/milp/model.hpp"
#include "sbrsp/network.hpp"
#include "sbrsp/travel_matrix.hpp"

namespace sbrsp {

// Routing data over local indices: stops 0..n-1, schools 0..m-1, riders
// 0..S-1. `delta` is a TravelTimeMatrix over exactly these stops and schools.
struct RoutingProblem {
  struct Rider {
    Id id = 0;
    int school = 0;
    std::vector<int> stops;      // catchment, local stop indices
    std::vector<double> walk_m;  // parallel to `stops`
  };
  struct Vehicle {
    Id id = 0;
    int capacity = 1;
  };

  std::vector<Id> stop_ids;
  std::vector<Id> school_ids;
  std::vector<Rider> riders;
  std::vector<Vehicle> buses;
  TravelTimeMatrix delta;
  double board_intercept = 0.0;    // A1
  double board_slope = 0.0;        // B1
  double deboard_intercept = 0.0;  // A2
  double deboard_slope = 0.0;      // B2
  double max_time = 0.0;           // T

  int stop_count() const { return static_cast<int>(stop_ids.size()); }
  int school_count() const { return static_cast<int>(school_ids.size()); }
  std::vector<int> demand() const;  // L_m
};

// Stop selection and student->stop map from the stop-minimizing step.
struct StopPreassignment {
  std::vector<int> selected;     // local stop indices, ascending
  std::vector<int> stop_of;      // per rider
};

enum class RoutingObjective {
  ride_time,    // Σ (d - p)
  load_travel,  // Σ Δ_ij w_ij over non school->stop arcs
};

struct RoutingVariant {
  bool school_to_stop_arcs = true;
  RoutingObjective objective = RoutingObjective::ride_time;
  // When set, assignments and stop selections are constants and unselected
  // stops leave the model.
  const StopPreassignment* fixed = nullptr;
  // With buses of equal capacity, rider s may only use buses 0..s. Any
  // solution maps onto one of these by numbering buses by their first rider.
  bool break_bus_symmetry = true;
};

RoutingVariant full_variant();
RoutingVariant reduced_variant(const StopPreassignment& pre);

// Multi-bus model over every bus of the problem.
milp::MiloModel build_full_model(const RoutingProblem& p);
// Requires exactly one bus and at least one rider.
milp::MiloModel build_single_bus_model(const RoutingProblem& p);
milp::MiloModel build_reduced_single_bus_model(const RoutingProblem& p, const StopPreassignment& pre);
milp::MiloModel build_routing_model(const RoutingProblem& p, const RoutingVariant& variant);

// Variable and node name tokens shared by builders, lifts and the validator.
namespace names {
std::string node(const RoutingProblem& p, int matrix_node);
std::string x(const RoutingProblem& p, int i, int j, int bus);
std::string w(const RoutingProblem& p, int i, int j, int bus);
std::string r(const RoutingProblem& p, int i, int bus);
std::string t(const RoutingProblem& p, int i, int bus);
std::string e(const RoutingProblem& p, int stop, int rider, int bus);
std::string v(const RoutingProblem& p, int school, int bus);
std::string pick(const RoutingProblem& p, int rider, int bus);
std::string drop(const RoutingProblem& p, int rider, int bus);
std::string tau(const RoutingProblem& p, int stop, int rider, int bus);
std::string kappa(const RoutingProblem& p, int school, int rider, int bus);
}  // namespace names

// One bus's route: matrix nodes strictly between O and D, and per rider the
// local stop used on this bus (-1 when the rider is on another bus).
struct Tour {
  int bus = 0;
  std::vector<int> nodes;
  std::vector<int> stop_of;
};

struct TourSchedule {
  std::vector<double> arrival;  // per entry of Tour::nodes
  std::vector<int> boarded;     // per entry
  std::vector<int> alighted;    // per entry
  std::vector<int> load_after;  // per entry
  double end_time = 0.0;        // t_D
  double ride_time = 0.0;       // Σ (drop - pick) over riders on the bus
  double load_travel = 0.0;     // Σ Δ w over travelled arcs
  bool feasible = true;         // order, capacity and t_D <= T
  std::string reason;
};

// Earliest arrival times along the tour.
TourSchedule schedule_tour(const RoutingProblem& p, const Tour& tour);

// Complete value map (every variable of every variant) for the given tours;
// buses without a tour get an all-zero route.
milp::ValueMap tour_values(const RoutingProblem& p, const std::vector<Tour>& tours);

// Reads tours back from solver values.
std::vector<Tour> extract_tours(const RoutingProblem& p, const RoutingVariant& variant, const milp::ValueMap& values);

// Independent constraint-by-constraint evaluation (absolute tolerance 1e-6).
std::vector<milp::Violation> validate_solution(const RoutingProblem& p, const RoutingVariant& variant,
                                               const milp::ValueMap& values, double tol = 1e-6);

double ride_time_objective(const RoutingProblem& p, const milp::ValueMap& values);

}  // namespace sbrsp
