#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sbrsp/options.hpp"

namespace sbrsp {

// Settings shared by every CLI command. Unset limits fall back to the
// instance parameters.
struct RunConfig {
  std::filesystem::path instance;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string solver = "highs";
  std::optional<double> time_limit_cluster_s;
  std::optional<double> time_limit_stopmin_s;
  std::optional<double> time_limit_reduced_s;
  std::optional<double> time_limit_full_s;
  std::optional<std::int64_t> node_limit;
  std::optional<double> mip_rel_gap;
  FeatureFlags features;
  int max_iterations = 20;
  std::optional<double> bpr_alpha;
  std::optional<double> bpr_beta;
  std::optional<double> peak_window_min;
  std::optional<double> walk_speed_mps;

  // Throws a usage error for missing paths or non-positive limits.
  void check() const;
  // Copies the mode-choice and walking overrides into the parameters.
  void apply(GlobalParams& params) const;
  PipelineOptions pipeline_options(const GlobalParams& params) const;
};

RunConfig parse_run_config(std::string_view json_text);
std::string run_config_to_json(const RunConfig& cfg);

// Feature flag by its JSON name (euclidean_kmeans, size_reduction, ...).
bool& feature_flag(FeatureFlags& f, std::string_view name);

}  // namespace sbrsp
