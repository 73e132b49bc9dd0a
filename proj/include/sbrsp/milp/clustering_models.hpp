#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbrsp/geometry.hpp"
#include "sbrsp/milp/model.hpp"

namespace sbrsp::milp {

// Capacitated assignment of points to fixed centroids, minimizing squared
// distance. Every bus receives at least one point. Variables z_<s>_<k>.
MiloModel build_assignment_step_model(std::span<const Point> points, std::span<const Point> centroids,
                                      std::span<const int> capacities);

// Road-network-aware clustering over pairwise times. `delta` is row-major
// S×S; entries are read only for pairs in the objective. `fixed_bus[s]` is the
// bus a student is pinned to, or -1 when free. Variables y_<s>_<k> and
// x_<s>_<s'>_<k>; pairs with both members pinned are left out.
MiloModel build_rna_kmeans_model(std::span<const int> capacities, std::span<const double> delta,
                                 std::span<const int> fixed_bus);

// Sum over ordered pairs in the same cluster of delta, for a full partition.
double rna_objective(std::span<const int> bus_of, std::span<const double> delta);

// Minimum stops covering every student. `catchments[s]` lists stop indices.
// Variables r_<i> and e_<i>_<s>.
MiloModel build_stop_min_model(int stops, const std::vector<std::vector<int>>& catchments);

namespace cluster_names {
std::string z(int s, int k);
std::string y(int s, int k);
std::string x(int s, int s2, int k);
std::string r(int i);
std::string e(int i, int s);
}  // namespace cluster_names

}  // namespace sbrsp::milp
