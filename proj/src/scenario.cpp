#include "sbrsp/scenario.hpp"

#include <algorithm>

#include "sbrsp/error.hpp"
#include "sbrsp/options.hpp"

namespace sbrsp {

Scenario make_scenario(const Instance& inst, std::vector<int> riders, std::vector<double> arc_times) {
  Scenario sc;
  sc.instance = &inst;
  std::sort(riders.begin(), riders.end());
  riders.erase(std::unique(riders.begin(), riders.end()), riders.end());
  for (int s : riders) {
    if (s < 0 || s >= static_cast<int>(inst.students.size())) throw Error(ErrorKind::validation, "rider index out of range");
  }
  sc.riders = std::move(riders);
  sc.arc_times = arc_times.empty() ? inst.network.freeflow_times() : std::move(arc_times);
  std::vector<NetworkLocation> stops, schools;
  for (const auto& st : inst.stops) stops.push_back(st.location);
  for (const auto& sch : inst.schools) schools.push_back(sch.location);
  sc.matrix = build_travel_matrix(inst.network, stops, schools, sc.arc_times);
  return sc;
}

PipelineOptions PipelineOptions::from_params(const GlobalParams& params, std::uint64_t seed, const std::string& backend) {
  PipelineOptions o;
  o.seed = seed;
  for (auto* s : {&o.cluster_solve, &o.stopmin_solve, &o.reduced_solve, &o.full_solve}) {
    s->backend = backend;
    s->seed = seed;
  }
  o.cluster_solve.time_limit_s = params.time_limit_cluster_s;
  o.stopmin_solve.time_limit_s = params.time_limit_stopmin_s;
  o.reduced_solve.time_limit_s = params.time_limit_reduced_s;
  o.full_solve.time_limit_s = params.time_limit_full_s;
  return o;
}

}  // namespace sbrsp
