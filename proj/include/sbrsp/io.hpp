#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sbrsp/clustering.hpp"
#include "sbrsp/experiments.hpp"
#include "sbrsp/metrics.hpp"
#include "sbrsp/modechoice.hpp"
#include "sbrsp/routing.hpp"

namespace sbrsp {

// Solution JSON carries no wall-clock times so reruns compare byte for byte.
std::string solution_to_json(const RouteSolution& sol);
RouteSolution parse_solution(std::string_view text, const Instance& inst);

// Members and stops are written as ids.
std::string clusters_to_json(const ClusterAssignment& ca, const Scenario& sc);
ClusterAssignment parse_clusters(std::string_view text, const Scenario& sc);

std::string metrics_to_json(const MetricsReport& m);
std::string equilibrium_to_json(const EquilibriumResult& eq, const Instance& inst);
std::string ablation_to_json(const std::vector<AblationRow>& rows);

// FeatureCollection of service regions (and expanded regions) per bus.
std::string regions_geojson(const ClusterAssignment& ca, const Scenario& sc);
// FeatureCollection with one LineString per route through its visits.
std::string routes_geojson(const RouteSolution& sol, const Instance& inst);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sbrsp
