#pragma once

#include <cmath>
#include <vector>

#include "sbrsp/geometry.hpp"
#include "sbrsp/milp/routing_model.hpp"
#include "sbrsp/random.hpp"

namespace fixtures {

// Euclidean travel times (seconds = metres / speed) between stops then schools.
inline sbrsp::TravelTimeMatrix euclid_matrix(const std::vector<sbrsp::Point>& stops,
                                             const std::vector<sbrsp::Point>& schools, double speed = 10.0) {
  std::vector<sbrsp::Point> pts = stops;
  pts.insert(pts.end(), schools.begin(), schools.end());
  const std::size_t P = pts.size();
  std::vector<double> phys(P * P);
  for (std::size_t a = 0; a < P; ++a) {
    for (std::size_t b = 0; b < P; ++b) phys[a * P + b] = sbrsp::distance(pts[a], pts[b]) / speed;
  }
  return {static_cast<int>(stops.size()), static_cast<int>(schools.size()), std::move(phys)};
}

inline sbrsp::RoutingProblem make_problem(sbrsp::TravelTimeMatrix delta, std::vector<sbrsp::RoutingProblem::Rider> riders,
                                          std::vector<int> capacities, double T, double a1 = 10, double b1 = 2,
                                          double a2 = 10, double b2 = 2) {
  sbrsp::RoutingProblem p;
  for (int i = 0; i < delta.stop_count(); ++i) p.stop_ids.push_back(100 + i);
  for (int m = 0; m < delta.school_count(); ++m) p.school_ids.push_back(500 + m);
  p.riders = std::move(riders);
  for (std::size_t k = 0; k < capacities.size(); ++k) p.buses.push_back({static_cast<sbrsp::Id>(k + 1), capacities[k]});
  p.delta = std::move(delta);
  p.board_intercept = a1;
  p.board_slope = b1;
  p.deboard_intercept = a2;
  p.deboard_slope = b2;
  p.max_time = T;
  return p;
}

inline sbrsp::RoutingProblem::Rider rider(sbrsp::Id id, int school, std::vector<int> stops) {
  sbrsp::RoutingProblem::Rider r;
  r.id = id;
  r.school = school;
  r.stops = std::move(stops);
  r.walk_m.assign(r.stops.size(), 0.0);
  return r;
}

// A time budget no route on the given matrix can hit, so unused-arc time rows
// stay slack.
inline double generous_T(const sbrsp::RoutingProblem& p) {
  const auto& D = p.delta;
  double dmax = 0.0;
  for (int a = 0; a < D.stop_count() + D.school_count(); ++a) {
    for (int b = 0; b < D.stop_count() + D.school_count(); ++b) dmax = std::max(dmax, D.physical(a, b));
  }
  const double S = static_cast<double>(p.riders.size());
  const double service = (D.stop_count() + D.school_count()) * std::max(p.board_intercept, p.deboard_intercept) +
                         S * (p.board_slope + p.deboard_slope);
  return 2.0 * (service + (D.stop_count() + D.school_count()) * dmax) + dmax;
}

}  // namespace fixtures
