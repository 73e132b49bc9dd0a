#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbrsp/routing.hpp"
#include "sbrsp/scenario.hpp"

namespace sbrsp {

inline constexpr int kPercentileLevels[] = {25, 50, 75, 80, 85, 90, 95};

struct StudentMetrics {
  Id student_id = 0;
  Id bus_id = 0;
  Id school_id = 0;
  double brts_s = 0.0;
  double walk_s = 0.0;
  double stt_s = 0.0;
  double detour_ratio = 1.0;
  double pickup_order = 0.0;  // rank among the bus's riders, (rank + 1) / riders
};

struct MetricsReport {
  std::string instance;
  int riders = 0;
  double total_brts_min = 0.0;
  double avg_brts_min = 0.0;
  double total_stt_min = 0.0;
  double avg_stt_min = 0.0;
  int stop_count = 0;
  double students_per_stop = 0.0;
  double total_btt_min = 0.0;
  double avg_btt_min = 0.0;
  double utilization = 0.0;  // riders / total bus capacity
  std::optional<double> total_pcts_min;
  int car_commuters = 0;
  std::vector<StudentMetrics> students;
  // school id -> level -> BRTS minutes
  std::map<Id, std::map<int, double>> school_percentiles_min;
  // bus id -> school id -> longest BRTS minutes
  std::map<Id, std::map<Id, double>> bus_max_brts_min;
};

struct MetricsInputs {
  double walk_speed_mps = 1.3;
  // Car times of students who drive, by instance student index.
  std::map<int, double> car_time_s;
};

// Linear interpolation between order statistics; level in [0, 100].
double percentile(std::vector<double> values, double level);

// Consistency problems of a route solution (legs against visits, loads,
// capacity, route time). Empty when consistent.
std::vector<std::string> check_route_solution(const Scenario& sc, const RouteSolution& sol);

// Throws a validation error when the solution fails check_route_solution.
MetricsReport compute_metrics(const Scenario& sc, const RouteSolution& sol, const MetricsInputs& in);

struct MetricDelta {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double diff = 0.0;     // positive when b improves on a
  double percent = 0.0;  // diff / a * 100
};

MetricDelta delta_of(const std::string& metric, double a, double b, bool lower_is_better = true);
// Throws when the reports come from different instances.
std::vector<MetricDelta> compare(const MetricsReport& a, const MetricsReport& b);

// One row per metric, one column per named report.
std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports);
std::string compare_csv(const std::vector<MetricDelta>& deltas);

}  // namespace sbrsp
