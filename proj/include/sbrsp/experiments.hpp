#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbrsp/options.hpp"
#include "sbrsp/pipeline.hpp"

namespace sbrsp {

struct AblationConfig {
  std::string name;
  FeatureFlags features;
};

// Base followed by the eight ablation rows.
std::vector<AblationConfig> standard_ablation_configs();

// Stable FNV-1a hash over the flags, stage limits, backend and seed.
std::string config_hash(const PipelineOptions& opts);

struct AblationRow {
  std::string name;
  FeatureFlags features;
  std::string status;  // ok | Infeasible | No sol. | No sol.*
  std::optional<double> objective;
  std::optional<double> gap_percent;  // (O - O_base) / O_base * 100
  double wall_time_s = 0.0;
  std::string message;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Failures become statuses. Throws a usage error without a Base config.
std::vector<AblationRow> run_ablation(const Scenario& sc, std::span<const AblationConfig> configs,
                                      const PipelineOptions& opts);

struct SweepPoint {
  double setting = 0.0;  // fleet size or walk distance (m)
  bool time_bound = true;
  std::string status;  // ok | Infeasible | No sol. | No sol.* | stranded
  double avg_brts_min = NAN;
  double avg_walk_min = NAN;
  double avg_stt_min = NAN;
  int stop_count = 0;
  std::string message;
};

// Same instance with `size` copies of the first bus. Without the time bound
// T becomes a bound no simple route can reach.
std::vector<SweepPoint> run_fleet_sweep(const Instance& inst, std::span<const int> sizes, bool include_unbounded,
                                        const PipelineOptions& opts);

std::vector<SweepPoint> run_walk_sweep(const Instance& inst, std::span<const double> distances_m,
                                       const PipelineOptions& opts);

std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string fleet_csv(const std::vector<SweepPoint>& points);
std::string walk_csv(const std::vector<SweepPoint>& points);

}  // namespace sbrsp
