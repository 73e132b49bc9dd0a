#include "sbrsp/pipeline.hpp"
#include <algorithm>

#include "sbrsp/error.hpp"

namespace sbrsp {

PipelineResult run_hracssas4(const Scenario& sc, const PipelineOptions& opts) {
  PipelineResult out;
  out.clusters = run_clustering(sc, opts);
  out.solution = route_all_clusters(sc, *out.clusters, opts);
  return out;
}

PipelineResult run_full_milo(const Scenario& sc, const PipelineOptions& opts) {
  const auto& inst = sc.inst();
  PipelineResult out;
  auto& sol = out.solution;
  sol.pipeline = "full-milo";
  const LocalProblem lp = make_full_problem(sc);
  for (int b : lp.buses) {
    BusRoute r;
    r.bus = b;
    r.bus_id = inst.buses[b].id;
    r.stages.riders = static_cast<int>(lp.rider_index.size());
    r.stages.candidate_stops = static_cast<int>(lp.stop_index.size());
    r.stages.stopmin.status = r.stages.reduced.status = "skipped";
    sol.routes.push_back(r);
  }
  try {
    const auto full = solve_full_routing(lp.problem, nullptr, opts.full_solve);
    for (std::size_t k = 0; k < lp.buses.size(); ++k) {
      sol.routes[k].stages.full = full.report;
      fill_route(sc, lp, full.tours.at(k), sol.routes[k], sol.legs);
      sol.total_ride_time += sol.routes[k].ride_time;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::no_solution) throw;
    for (auto& r : sol.routes) {
      r.status = e.kind() == ErrorKind::infeasible ? "Infeasible" : "No sol.";
      r.message = e.what();
    }
  }
  std::sort(sol.legs.begin(), sol.legs.end(), [](const StudentLeg& a, const StudentLeg& b) { return a.student < b.student; });
  return out;
}

}  // namespace sbrsp
