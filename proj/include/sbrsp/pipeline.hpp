#pragma once

#include <optional>

#include "sbrsp/clustering.hpp"
#include "sbrsp/options.hpp"
#include "sbrsp/routing.hpp"
#include "sbrsp/scenario.hpp"

namespace sbrsp {

struct PipelineResult {
  std::optional<ClusterAssignment> clusters;  // absent for the direct model
  RouteSolution solution;
};

// Cluster-then-route heuristic.
PipelineResult run_hracssas4(const Scenario& sc, const PipelineOptions& opts);
// Direct multi-bus model over every rider; tiny instances only.
PipelineResult run_full_milo(const Scenario& sc, const PipelineOptions& opts);

}  // namespace sbrsp
