#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/experiments.hpp"
#include "sbrsp/instance.hpp"
#include "sbrsp/io.hpp"
#include "sbrsp/metrics.hpp"
#include "sbrsp/modechoice.hpp"
#include "sbrsp/pipeline.hpp"
#include "sbrsp/run_config.hpp"

namespace fs = std::filesystem;
using namespace sbrsp;

namespace {

struct Flags {
  std::string config;
  std::string instance;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> solver;
  std::optional<double> time_limit;
  std::optional<double> tl_cluster, tl_stopmin, tl_reduced, tl_full;
  std::optional<std::int64_t> node_limit;
  std::optional<double> mip_gap;
  std::vector<std::string> disable;
};

void add_run_flags(CLI::App* cmd, Flags& f, bool needs_instance = true) {
  if (needs_instance) cmd->add_option("instance", f.instance, "Instance JSON")->required();
  cmd->add_option("--config", f.config, "Run config JSON");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--jobs", f.jobs, "Worker threads");
  cmd->add_option("--solver", f.solver, "MILP backend id (highs | highs-lp)");
  cmd->add_option("--time-limit", f.time_limit, "Time limit for every stage (s)");
  cmd->add_option("--time-limit-cluster", f.tl_cluster, "Clustering stage limit (s)");
  cmd->add_option("--time-limit-stopmin", f.tl_stopmin, "Stop pre-assignment limit (s)");
  cmd->add_option("--time-limit-reduced", f.tl_reduced, "Reduced routing limit (s)");
  cmd->add_option("--time-limit-full", f.tl_full, "Full routing limit (s)");
  cmd->add_option("--node-limit", f.node_limit, "Branch-and-bound node cap for every stage");
  cmd->add_option("--mip-gap", f.mip_gap, "Relative MIP gap");
  cmd->add_option("--disable", f.disable, "Switch off a pipeline feature (repeatable)");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = parse_run_config(read_text(f.config));
  if (!f.instance.empty()) c.instance = f.instance;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.solver) c.solver = *f.solver;
  if (f.time_limit) c.time_limit_cluster_s = c.time_limit_stopmin_s = c.time_limit_reduced_s = c.time_limit_full_s = f.time_limit;
  if (f.tl_cluster) c.time_limit_cluster_s = f.tl_cluster;
  if (f.tl_stopmin) c.time_limit_stopmin_s = f.tl_stopmin;
  if (f.tl_reduced) c.time_limit_reduced_s = f.tl_reduced;
  if (f.tl_full) c.time_limit_full_s = f.tl_full;
  if (f.node_limit) c.node_limit = f.node_limit;
  if (f.mip_gap) c.mip_rel_gap = f.mip_gap;
  for (const auto& name : f.disable) feature_flag(c.features, name) = false;
  c.check();
  if (c.instance.empty()) throw Error(ErrorKind::usage, "no instance given");
  return c;
}

Instance load(const RunConfig& c) {
  Instance inst = load_instance(c.instance);
  c.apply(inst.params);
  spdlog::info("loaded {}: {} students, {} stops, {} buses", inst.name, inst.students.size(), inst.stops.size(),
               inst.buses.size());
  return inst;
}

void emit(const RunConfig& c, const std::string& name, const std::string& text) {
  const fs::path path = c.out_dir / name;
  write_text(path, text);
  spdlog::info("wrote {}", path.string());
}

void write_solution(const RunConfig& c, const Scenario& sc, const RouteSolution& sol) {
  emit(c, "solution.json", solution_to_json(sol));
  emit(c, "routes.geojson", routes_geojson(sol, sc.inst()));
  if (sol.status() == "ok") {
    MetricsInputs mi;
    mi.walk_speed_mps = sc.inst().params.walk_speed_mps;
    const auto m = compute_metrics(sc, sol, mi);
    emit(c, "metrics.csv", metrics_csv({{sc.inst().name, m}}));
    emit(c, "metrics.json", metrics_to_json(m));
  }
  std::cout << "status " << sol.status() << " total_ride_time_s " << sol.total_ride_time << "\n";
  sol.require_ok();
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    if (!(is >> v)) throw Error(ErrorKind::usage, std::string("bad ") + what + " list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"School bus routing with stop selection and mode choice"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off");

  Flags f;
  std::string path_a, path_b, pipeline = "hracssas4", output, spec_path, configs_arg, sizes_arg, distances_arg;
  std::optional<Id> bus_id;
  bool no_unbounded = false, reduced = false;
  GeneratorSpec gen;
  std::uint64_t gen_seed = 0;

  auto* validate = app.add_subcommand("validate", "Check an instance");
  validate->add_option("instance", f.instance)->required();

  auto* generate = app.add_subcommand("generate", "Write a synthetic instance");
  generate->add_option("--spec", spec_path, "Generator spec JSON");
  generate->add_option("--students", gen.students);
  generate->add_option("--schools", gen.schools);
  generate->add_option("--buses", gen.buses);
  generate->add_option("--style", gen.network_style, "grid | random-tree | mixed");
  generate->add_option("--stop-density", gen.stop_density, "Candidate stops per km of road");
  generate->add_option("--area-km", gen.area_km);
  generate->add_option("--nodes", gen.network_nodes);
  generate->add_option("--sometimes-share", gen.sometimes_share);
  generate->add_option("--never-share", gen.never_share);
  generate->add_option("--seed", gen_seed);
  generate->add_option("-o,--output", output, "Instance path")->required();

  auto* cluster = app.add_subcommand("cluster", "Cluster riders and write service regions");
  add_run_flags(cluster, f);

  auto* route = app.add_subcommand("route", "Route each cluster");
  add_run_flags(route, f);
  route->add_option("--clusters", path_a, "Clusters JSON from `cluster`");

  auto* solve = app.add_subcommand("solve", "Cluster and route, or solve the direct model");
  add_run_flags(solve, f);
  solve->add_option("--pipeline", pipeline, "hracssas4 | full-milo")->check(CLI::IsMember({"hracssas4", "full-milo"}));

  auto* iterate = app.add_subcommand("iterate", "Mode-choice fixed point");
  add_run_flags(iterate, f);
  iterate->add_option("-o,--output", output, "Equilibrium JSON path");

  auto* ablate = app.add_subcommand("ablate", "Run the ablation configurations");
  add_run_flags(ablate, f);
  ablate->add_option("--configs", configs_arg, "Row numbers, 0 = Base (default all)");

  auto* sweep_fleet = app.add_subcommand("sweep-fleet", "Fleet-size sweep");
  add_run_flags(sweep_fleet, f);
  sweep_fleet->add_option("--sizes", sizes_arg, "Comma-separated fleet sizes")->required();
  sweep_fleet->add_flag("--no-unbounded", no_unbounded, "Skip the runs without the route-time bound");

  auto* sweep_walk = app.add_subcommand("sweep-walk", "Walking-distance sweep");
  add_run_flags(sweep_walk, f);
  sweep_walk->add_option("--distances", distances_arg, "Comma-separated distances in metres, ascending")->required();

  auto* report = app.add_subcommand("report", "Metrics of a solution, or a comparison of two");
  add_run_flags(report, f);
  report->add_option("solution", path_a, "Solution JSON")->required();
  report->add_option("--against", path_b, "Baseline solution JSON (A in the comparison)");

  auto* export_regions = app.add_subcommand("export-regions", "GeoJSON of service regions");
  add_run_flags(export_regions, f);
  export_regions->add_option("clusters", path_a, "Clusters JSON")->required();

  auto* dump = app.add_subcommand("dump-model", "Write a routing model as LP text");
  add_run_flags(dump, f);
  dump->add_option("--clusters", path_a, "Clusters JSON; dumps one bus's model");
  dump->add_option("--bus", bus_id, "Bus id (with --clusters)");
  dump->add_flag("--reduced", reduced, "Dump the reduced model after stop pre-assignment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_default_logger(spdlog::stderr_color_st("sbrsp"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*validate) {
    const Instance inst = load_instance(f.instance);
    std::cout << "ok " << inst.name << ": " << inst.students.size() << " students, " << inst.schools.size()
              << " schools, " << inst.stops.size() << " stops, " << inst.buses.size() << " buses\n";
    return 0;
  }
  if (*generate) {
    if (!spec_path.empty()) gen = parse_generator_spec(read_text(spec_path));
    save_instance(generate_synthetic(gen, gen_seed), output);
    return 0;
  }

  const RunConfig cfg = resolve(f);
  Instance inst = load(cfg);
  const PipelineOptions opts = cfg.pipeline_options(inst.params);
  const Scenario sc = make_scenario(inst, inst.status_quo_riders());
  spdlog::info("{} riders, config {}", sc.riders.size(), config_hash(opts));

  if (*cluster) {
    const auto ca = run_clustering(sc, opts);
    emit(cfg, "clusters.json", clusters_to_json(ca, sc));
    emit(cfg, "regions.geojson", regions_geojson(ca, sc));
  } else if (*route) {
    const auto ca = path_a.empty() ? run_clustering(sc, opts) : parse_clusters(read_text(path_a), sc);
    write_solution(cfg, sc, route_all_clusters(sc, ca, opts));
  } else if (*solve) {
    const auto res = pipeline == "full-milo" ? run_full_milo(sc, opts) : run_hracssas4(sc, opts);
    if (res.clusters) emit(cfg, "clusters.json", clusters_to_json(*res.clusters, sc));
    write_solution(cfg, sc, res.solution);
  } else if (*iterate) {
    const auto eq = run_fixed_point(inst, opts, cfg.max_iterations);
    const fs::path path = output.empty() ? cfg.out_dir / "equilibrium.json" : fs::path(output);
    write_text(path, equilibrium_to_json(eq, inst));
    std::vector<std::pair<std::string, MetricsReport>> rows;
    for (const auto& it : eq.iterations) rows.emplace_back("iteration_" + std::to_string(it.iteration), it.metrics);
    emit(cfg, "iterations.csv", metrics_csv(rows));
    std::cout << (eq.converged ? "converged" : "not converged") << " after " << eq.iterations.size()
              << " iterations, A " << eq.calibration.A;
    if (eq.cycle_length) std::cout << ", rider sets cycle with period " << *eq.cycle_length;
    std::cout << "\n";
  } else if (*ablate) {
    auto all = standard_ablation_configs();
    std::vector<AblationConfig> chosen;
    if (configs_arg.empty()) {
      chosen = all;
    } else {
      for (int i : parse_list<int>(configs_arg, "config")) {
        if (i < 0 || i >= static_cast<int>(all.size())) throw Error(ErrorKind::usage, "no ablation row " + std::to_string(i));
        chosen.push_back(all[i]);
      }
    }
    const auto rows = run_ablation(sc, chosen, opts);
    emit(cfg, "ablation.csv", ablation_csv(rows));
    emit(cfg, "ablation.json", ablation_to_json(rows));
    std::cout << ablation_csv(rows);
  } else if (*sweep_fleet) {
    const auto sizes = parse_list<int>(sizes_arg, "size");
    const auto pts = run_fleet_sweep(inst, sizes, !no_unbounded, opts);
    emit(cfg, "fleet.csv", fleet_csv(pts));
    std::cout << fleet_csv(pts);
  } else if (*sweep_walk) {
    const auto d = parse_list<double>(distances_arg, "distance");
    const auto pts = run_walk_sweep(inst, d, opts);
    emit(cfg, "walk.csv", walk_csv(pts));
    std::cout << walk_csv(pts);
  } else if (*report) {
    MetricsInputs mi;
    mi.walk_speed_mps = inst.params.walk_speed_mps;
    const auto b = compute_metrics(sc, parse_solution(read_text(path_a), inst), mi);
    std::vector<std::pair<std::string, MetricsReport>> cols;
    if (!path_b.empty()) {
      const auto a = compute_metrics(sc, parse_solution(read_text(path_b), inst), mi);
      cols.emplace_back("A", a);
      cols.emplace_back("B", b);
      emit(cfg, "compare.csv", compare_csv(compare(a, b)));
      std::cout << compare_csv(compare(a, b));
    } else {
      cols.emplace_back(inst.name, b);
      std::cout << metrics_csv(cols);
    }
    emit(cfg, "metrics.csv", metrics_csv(cols));
  } else if (*export_regions) {
    emit(cfg, "regions.geojson", regions_geojson(parse_clusters(read_text(path_a), sc), sc));
  } else if (*dump) {
    if (path_a.empty()) {
      emit(cfg, "model.lp", build_full_model(make_full_problem(sc).problem).to_lp());
    } else {
      if (!bus_id) throw Error(ErrorKind::usage, "--bus is required with --clusters");
      const auto ca = parse_clusters(read_text(path_a), sc);
      int k = -1;
      for (std::size_t i = 0; i < inst.buses.size(); ++i) {
        if (inst.buses[i].id == *bus_id) k = static_cast<int>(i);
      }
      if (k < 0) throw Error(ErrorKind::usage, "no bus " + std::to_string(*bus_id));
      const auto lp = make_cluster_problem(sc, ca, k);
      if (reduced) {
        const auto pre = stop_min_preassign(lp.problem, opts.stopmin_solve);
        emit(cfg, "model.lp", build_reduced_single_bus_model(lp.problem, pre.pre).to_lp());
      } else {
        emit(cfg, "model.lp", build_single_bus_model(lp.problem).to_lp());
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << e.to_json() << "\n";
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorKind::backend, e.what());
    std::cerr << wrapped.to_json() << "\n";
    return 1;
  }
}
