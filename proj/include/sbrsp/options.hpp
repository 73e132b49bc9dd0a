#pragma once

#include <cstdint>
#include <string>

#include "sbrsp/instance.hpp"
#include "sbrsp/milp/solver.hpp"

namespace sbrsp {

// Pipeline components that an ablation can switch off. All on is the base
// configuration.
struct FeatureFlags {
  bool euclidean_kmeans = true;
  bool size_reduction = true;
  bool road_network_awareness = true;
  bool a5_removal = true;
  bool objective_modification = true;
  bool preassignment = true;
  bool reduced_routing = true;

  friend bool operator==(const FeatureFlags&, const FeatureFlags&) = default;
};

struct PipelineOptions {
  FeatureFlags features;
  milp::SolveOptions cluster_solve;
  milp::SolveOptions stopmin_solve;
  milp::SolveOptions reduced_solve;
  milp::SolveOptions full_solve;
  std::uint64_t seed = 0;
  int jobs = 1;

  // Stage limits from the instance parameters, one backend for every stage.
  static PipelineOptions from_params(const GlobalParams& params, std::uint64_t seed = 0,
                                     const std::string& backend = "highs");
};

}  // namespace sbrsp
