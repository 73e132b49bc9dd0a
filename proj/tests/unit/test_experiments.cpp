#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/experiments.hpp"
#include "sbrsp/io.hpp"
#include "sbrsp/pipeline.hpp"
#include "sbrsp/run_config.hpp"

using namespace sbrsp;
using nlohmann::json;

namespace {

Instance small_instance() {
  GeneratorSpec spec;
  spec.students = 10;
  spec.schools = 2;
  spec.buses = 3;
  spec.bus_capacity = 4;
  spec.area_km = 2.5;
  spec.network_nodes = 20;
  spec.stop_density = 2.0;
  return generate_synthetic(spec, 12);
}

PipelineOptions quick(const Instance& inst) {
  PipelineOptions o = PipelineOptions::from_params(inst.params, 5);
  for (auto* s : {&o.cluster_solve, &o.stopmin_solve, &o.reduced_solve, &o.full_solve}) s->node_limit = 50;
  return o;
}

Scenario all_riders(const Instance& inst) {
  std::vector<int> riders(inst.students.size());
  for (std::size_t i = 0; i < riders.size(); ++i) riders[i] = static_cast<int>(i);
  return make_scenario(inst, riders);
}

}  // namespace

TEST_CASE("ablation rows carry their hash and seed, with Base at zero gap") {
  const Instance inst = small_instance();
  const Scenario sc = all_riders(inst);
  const auto all = standard_ablation_configs();
  REQUIRE(all.size() == 9);
  CHECK(all[0].name == "Base");
  const std::vector<AblationConfig> two = {all[0], all[1]};
  const auto rows = run_ablation(sc, two, quick(inst));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status == "ok");
  REQUIRE(rows[0].gap_percent.has_value());
  CHECK(*rows[0].gap_percent == 0.0);
  for (const auto& r : rows) {
    CHECK(r.seed == 5);
    CHECK(r.config_hash.size() == 16);
    if (r.status == "ok") {
      CHECK(*r.gap_percent == doctest::Approx((*r.objective - *rows[0].objective) / *rows[0].objective * 100));
    }
  }
  CHECK(rows[0].config_hash != rows[1].config_hash);
  const std::string csv = ablation_csv(rows);
  CHECK(csv.find("Base") != std::string::npos);

  const std::vector<AblationConfig> no_base = {all[1]};
  try {
    run_ablation(sc, no_base, quick(inst));
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
}

TEST_CASE("config hash depends only on the settings") {
  const Instance inst = small_instance();
  PipelineOptions a = quick(inst);
  PipelineOptions b = quick(inst);
  CHECK(config_hash(a) == config_hash(b));
  b.features.reduced_routing = false;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.seed = 6;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("fleet sweep below the seat count is infeasible") {
  const Instance inst = small_instance();
  const std::vector<int> sizes = {2, 3};
  const auto pts = run_fleet_sweep(inst, sizes, false, quick(inst));
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].setting == 2);
  CHECK(pts[0].status == "Infeasible");
  CHECK(pts[1].status == "ok");
  CHECK(pts[1].stop_count > 0);
  CHECK(pts[1].avg_brts_min > 0);
  CHECK(fleet_csv(pts).find("Infeasible") != std::string::npos);
}

TEST_CASE("walk sweep at zero distance strands students") {
  const Instance inst = small_instance();
  const std::vector<double> d = {0.0};
  const auto pts = run_walk_sweep(inst, d, quick(inst));
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].status == "stranded");
  CHECK_FALSE(pts[0].message.empty());
}

TEST_CASE("solution, clusters and run config survive a JSON round trip") {
  const Instance inst = small_instance();
  const Scenario sc = all_riders(inst);
  const PipelineResult res = run_hracssas4(sc, quick(inst));
  const std::string sol = solution_to_json(res.solution);
  CHECK(solution_to_json(parse_solution(sol, inst)) == sol);
  REQUIRE(res.clusters.has_value());
  const std::string cl = clusters_to_json(*res.clusters, sc);
  CHECK(clusters_to_json(parse_clusters(cl, sc), sc) == cl);

  const json routes = json::parse(routes_geojson(res.solution, inst));
  CHECK(routes["type"] == "FeatureCollection");
  CHECK(routes["features"].size() >= 1);
  const json regions = json::parse(regions_geojson(*res.clusters, sc));
  CHECK(regions["type"] == "FeatureCollection");

  RunConfig cfg;
  cfg.instance = std::filesystem::temp_directory_path() / "sbrsp_roundtrip_instance.json";
  save_instance(inst, cfg.instance);
  cfg.seed = 9;
  cfg.node_limit = 30;
  cfg.features.a5_removal = false;
  const std::string text = run_config_to_json(cfg);
  CHECK(run_config_to_json(parse_run_config(text)) == text);
  cfg.node_limit = -1;
  try {
    cfg.check();
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
}

TEST_CASE("error JSON names kind and subject") {
  const Error e(ErrorKind::stranded_student, "no stop", "student 4");
  const json j = json::parse(e.to_json());
  CHECK(j["error"] == "stranded_student");
  CHECK(j["subject"] == "student 4");
  CHECK(j["message"] == "no stop");
}
