#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbrsp/geometry.hpp"
#include "sbrsp/options.hpp"
#include "sbrsp/scenario.hpp"

namespace sbrsp {

// Partition of a scenario's riders over the buses. Student positions index
// Scenario::riders; buses index Instance::buses.
struct ClusterAssignment {
  std::vector<int> bus_of;          // per rider position
  std::vector<Point> centroids;     // per bus
  std::vector<Region> regions;      // current service region per bus
  std::vector<Region> expanded;     // regions grown by the walking distance
  std::vector<std::vector<int>> stops;  // instance stop indices per bus

  // Size reduction: overlap students, interior students, and the interior
  // students on the region's largest road component (kept fixed).
  std::vector<std::vector<int>> overlap;
  std::vector<std::vector<int>> interior;
  std::vector<std::vector<int>> connected;
  std::vector<int> free_students;

  int kmeans_iterations = 0;
  bool kmeans_converged = false;
  double kmeans_objective = 0.0;  // squared metres to final centroids
  // Pair objective over pairs with a free member, before and after re-clustering.
  std::optional<double> rna_objective_before;
  std::optional<double> rna_objective_after;
  std::optional<std::string> rna_status;

  int bus_count() const { return static_cast<int>(centroids.size()); }
  std::vector<int> members(int bus) const;
};

ClusterAssignment euclidean_constrained_kmeans(const Scenario& sc, const PipelineOptions& opts);

// Service regions from the current partition, then the free/fixed split.
ClusterAssignment compute_free_students(ClusterAssignment ca, const Scenario& sc);

// Pairwise bus times between rider homes; rows and columns of `needed`
// riders are filled, other entries are NaN. All when `needed` is empty.
std::vector<double> student_pair_times(const Scenario& sc, const std::vector<int>& needed = {});

// Re-clusters free riders on road travel times, warm-started from `ca`.
ClusterAssignment reduced_rna_kmeans(ClusterAssignment ca, const Scenario& sc, const PipelineOptions& opts);

// Expands each region by the walking distance and collects its stops.
ClusterAssignment assign_stops_to_clusters(ClusterAssignment ca, const Scenario& sc);

// The full clustering phase under the given feature flags.
ClusterAssignment run_clustering(const Scenario& sc, const PipelineOptions& opts);

std::vector<Point> rider_points(const Scenario& sc);
std::vector<int> clustering_capacities(const Instance& inst);

}  // namespace sbrsp
