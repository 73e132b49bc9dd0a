#include "sbrsp/run_config.hpp"

#include "json.hpp"
#include "sbrsp/error.hpp"

namespace sbrsp {

using nlohmann::json;

bool& feature_flag(FeatureFlags& f, std::string_view name) {
  if (name == "euclidean_kmeans") return f.euclidean_kmeans;
  if (name == "size_reduction") return f.size_reduction;
  if (name == "road_network_awareness") return f.road_network_awareness;
  if (name == "a5_removal") return f.a5_removal;
  if (name == "objective_modification") return f.objective_modification;
  if (name == "preassignment") return f.preassignment;
  if (name == "reduced_routing") return f.reduced_routing;
  throw Error(ErrorKind::usage, "unknown feature '" + std::string(name) + "'");
}

void RunConfig::check() const {
  if (!instance.empty() && !std::filesystem::exists(instance)) {
    throw Error(ErrorKind::usage, "instance file " + instance.string() + " does not exist", "instance");
  }
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0)) throw Error(ErrorKind::usage, std::string(name) + " must be positive", name);
  };
  positive(time_limit_cluster_s, "time_limits.cluster");
  positive(time_limit_stopmin_s, "time_limits.stopmin");
  positive(time_limit_reduced_s, "time_limits.reduced");
  positive(time_limit_full_s, "time_limits.full");
  positive(walk_speed_mps, "mode_choice.walk_speed_mps");
  positive(peak_window_min, "mode_choice.peak_window_min");
  if (node_limit && *node_limit <= 0) throw Error(ErrorKind::usage, "node_limit must be positive", "node_limit");
  if (mip_rel_gap && *mip_rel_gap < 0.0) throw Error(ErrorKind::usage, "mip_gap must be non-negative", "mip_gap");
  if (jobs < 1) throw Error(ErrorKind::usage, "jobs must be at least 1", "jobs");
  if (max_iterations < 1) throw Error(ErrorKind::usage, "max_iterations must be at least 1", "mode_choice.max_iterations");
}

void RunConfig::apply(GlobalParams& p) const {
  if (time_limit_cluster_s) p.time_limit_cluster_s = *time_limit_cluster_s;
  if (time_limit_stopmin_s) p.time_limit_stopmin_s = *time_limit_stopmin_s;
  if (time_limit_reduced_s) p.time_limit_reduced_s = *time_limit_reduced_s;
  if (time_limit_full_s) p.time_limit_full_s = *time_limit_full_s;
  if (bpr_alpha) p.bpr_alpha = *bpr_alpha;
  if (bpr_beta) p.bpr_beta = *bpr_beta;
  if (peak_window_min) p.peak_window_min = *peak_window_min;
  if (walk_speed_mps) p.walk_speed_mps = *walk_speed_mps;
}

PipelineOptions RunConfig::pipeline_options(const GlobalParams& params) const {
  GlobalParams p = params;
  apply(p);
  PipelineOptions o = PipelineOptions::from_params(p, seed, solver);
  o.features = features;
  o.jobs = jobs;
  for (auto* s : {&o.cluster_solve, &o.stopmin_solve, &o.reduced_solve, &o.full_solve}) {
    if (node_limit) s->node_limit = node_limit;
    if (mip_rel_gap) s->mip_rel_gap = *mip_rel_gap;
  }
  return o;
}

namespace {

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const char* kFeatureNames[] = {"euclidean_kmeans", "size_reduction", "road_network_awareness", "a5_removal",
                               "objective_modification", "preassignment", "reduced_routing"};

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    if (auto it = j.find("instance"); it != j.end()) c.instance = it->get<std::string>();
    if (auto it = j.find("out"); it != j.end()) c.out_dir = it->get<std::string>();
    get(j, "seed", c.seed);
    get(j, "jobs", c.jobs);
    get(j, "solver", c.solver);
    get_opt(j, "node_limit", c.node_limit);
    get_opt(j, "mip_gap", c.mip_rel_gap);
    if (auto it = j.find("time_limits"); it != j.end()) {
      get_opt(*it, "cluster", c.time_limit_cluster_s);
      get_opt(*it, "stopmin", c.time_limit_stopmin_s);
      get_opt(*it, "reduced", c.time_limit_reduced_s);
      get_opt(*it, "full", c.time_limit_full_s);
    }
    if (auto it = j.find("features"); it != j.end()) {
      for (const auto& [name, value] : it->items()) feature_flag(c.features, name) = value.get<bool>();
    }
    if (auto it = j.find("mode_choice"); it != j.end()) {
      get(*it, "max_iterations", c.max_iterations);
      get_opt(*it, "bpr_alpha", c.bpr_alpha);
      get_opt(*it, "bpr_beta", c.bpr_beta);
      get_opt(*it, "peak_window_min", c.peak_window_min);
      get_opt(*it, "walk_speed_mps", c.walk_speed_mps);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, std::string("bad run config: ") + e.what());
  }
  c.check();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json features = json::object();
  FeatureFlags f = c.features;
  for (const char* name : kFeatureNames) features[name] = feature_flag(f, name);
  json j = {{"instance", c.instance.string()},
            {"out", c.out_dir.string()},
            {"seed", c.seed},
            {"jobs", c.jobs},
            {"solver", c.solver},
            {"node_limit", opt_json(c.node_limit)},
            {"mip_gap", opt_json(c.mip_rel_gap)},
            {"time_limits",
             {{"cluster", opt_json(c.time_limit_cluster_s)},
              {"stopmin", opt_json(c.time_limit_stopmin_s)},
              {"reduced", opt_json(c.time_limit_reduced_s)},
              {"full", opt_json(c.time_limit_full_s)}}},
            {"features", features},
            {"mode_choice",
             {{"max_iterations", c.max_iterations},
              {"bpr_alpha", opt_json(c.bpr_alpha)},
              {"bpr_beta", opt_json(c.bpr_beta)},
              {"peak_window_min", opt_json(c.peak_window_min)},
              {"walk_speed_mps", opt_json(c.walk_speed_mps)}}}};
  return j.dump(2) + "\n";
}

}  // namespace sbrsp
