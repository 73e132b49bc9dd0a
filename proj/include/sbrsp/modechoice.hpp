#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sbrsp/metrics.hpp"
#include "sbrsp/options.hpp"
#include "sbrsp/pipeline.hpp"

namespace sbrsp {

// Probability of choosing the bus; car_s and bus_s are door-to-door times.
double choice_probability(double A, double car_s, double bus_s);

struct Calibration {
  double A = 0.0;
  double target = 0.0;
  double achieved = 0.0;  // sum of probabilities at A
};

// Finds A >= 0 with sum_s 1 / (1 + exp(-A d_s)) = target, d_s = T_cs - T_bs.
// Accepts a point within 0.5 of the target; otherwise throws a calibration
// error naming the reachable range.
Calibration calibrate_A(std::span<const double> deltas, double target);

struct Selection {
  std::vector<int> chosen;        // positions into the input, in admission order
  std::optional<double> cutoff;   // probability of the last admitted student
};

// Top `quota` by probability, ties by smaller id.
Selection select_riders(std::span<const double> probability, std::span<const Id> ids, int quota);

double bpr_time(double freeflow_s, double flow, double capacity, double alpha, double beta);

struct CongestionState {
  std::vector<double> flows;      // vehicles per peak window, per arc
  std::vector<double> arc_times;  // congested seconds, per arc
};

// Loads each car commuter on its free-flow shortest path to school.
CongestionState load_car_trips(const Instance& inst, std::span<const int> car_commuters);

// Door-to-door car time under `arc_times`.
double car_time(const Instance& inst, int student, std::span<const double> arc_times);

// Walk plus ride time on the bus. Riders use their own leg; other students
// use the nearest visited stop in their catchment whose route reaches their
// school afterwards, else their nearest stop plus the free-flow drive.
std::vector<double> bus_times(const Scenario& sc, const RouteSolution& sol, std::span<const int> students);

struct IterationRecord {
  int iteration = 0;
  std::vector<int> riders;  // routed this iteration
  RouteSolution solution;
  MetricsReport metrics;
  int car_trips = 0;
  double objective = 0.0;  // total STT + total PCTS, minutes
  std::map<int, double> car_time_s;
  std::map<int, double> bus_time_s;
  std::map<int, double> probability;
  CongestionState congestion;  // arc times the iteration routed under
};

struct EquilibriumResult {
  std::vector<IterationRecord> iterations;
  int final_iteration = 0;  // index into iterations
  bool converged = false;
  // Set when a rider set of iteration 2 or later comes back: from there the
  // loop only repeats, so it stops without converging.
  std::optional<int> cycle_length;
  // First iteration whose rider count equals the previous iteration's.
  std::optional<int> count_stable_iteration;
  Calibration calibration;
  std::optional<double> cutoff;
  int target_riders = 0;  // Y_b

  const IterationRecord& final() const { return iterations.at(final_iteration); }
};

EquilibriumResult run_fixed_point(const Instance& inst, const PipelineOptions& opts, int max_iterations = 20);

}  // namespace sbrsp
