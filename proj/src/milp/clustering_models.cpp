#include "sbrsp/milp/clustering_models.hpp"

#include <string>

#include "sbrsp/error.hpp"

namespace sbrsp::milp {

namespace cluster_names {
std::string z(int s, int k) { return "z_" + std::to_string(s) + "_" + std::to_string(k); }
std::string y(int s, int k) { return "y_" + std::to_string(s) + "_" + std::to_string(k); }
std::string x(int s, int s2, int k) {
  return "x_" + std::to_string(s) + "_" + std::to_string(s2) + "_" + std::to_string(k);
}
std::string r(int i) { return "r_" + std::to_string(i); }
std::string e(int i, int s) { return "e_" + std::to_string(i) + "_" + std::to_string(s); }
}  // namespace cluster_names

namespace {

void check_capacity(std::span<const int> capacities, std::size_t students) {
  long total = 0;
  for (int c : capacities) total += c;
  if (capacities.empty() || total < static_cast<long>(students)) {
    throw Error(ErrorKind::capacity, "total bus capacity " + std::to_string(total) + " is below " +
                                         std::to_string(students) + " students");
  }
  if (capacities.size() > students) {
    throw Error(ErrorKind::capacity, "more buses than students: every bus needs at least one student");
  }
}

}  // namespace

MiloModel build_assignment_step_model(std::span<const Point> points, std::span<const Point> centroids,
                                      std::span<const int> capacities) {
  const int S = static_cast<int>(points.size());
  const int K = static_cast<int>(centroids.size());
  if (capacities.size() != centroids.size()) throw Error(ErrorKind::validation, "centroid and capacity counts differ");
  check_capacity(capacities, points.size());
  MiloModel m("assignment_step");
  std::vector<int> z(static_cast<std::size_t>(S) * K);
  std::vector<Term> obj;
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      z[s * K + k] = m.add_binary(cluster_names::z(s, k));
      obj.push_back({z[s * K + k], squared_distance(points[s], centroids[k])});
    }
  }
  for (int s = 0; s < S; ++s) {
    std::vector<Term> row;
    for (int k = 0; k < K; ++k) row.push_back({z[s * K + k], 1.0});
    m.add_constraint("assign_" + std::to_string(s), std::move(row), Sense::eq, 1.0);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<Term> row;
    for (int s = 0; s < S; ++s) row.push_back({z[s * K + k], 1.0});
    m.add_constraint("capacity_" + std::to_string(k), row, Sense::le, capacities[k]);
    m.add_constraint("nonempty_" + std::to_string(k), std::move(row), Sense::ge, 1.0);
  }
  m.set_objective(std::move(obj));
  return m;
}

MiloModel build_rna_kmeans_model(std::span<const int> capacities, std::span<const double> delta,
                                 std::span<const int> fixed_bus) {
  const int S = static_cast<int>(fixed_bus.size());
  const int K = static_cast<int>(capacities.size());
  if (delta.size() != static_cast<std::size_t>(S) * S) throw Error(ErrorKind::validation, "pair time matrix size mismatch");
  check_capacity(capacities, fixed_bus.size());
  auto allowed = [&](int s, int k) { return fixed_bus[s] < 0 || fixed_bus[s] == k; };

  MiloModel m("rna_kmeans");
  std::vector<int> y(static_cast<std::size_t>(S) * K);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      y[s * K + k] = m.add_binary(cluster_names::y(s, k));
      if (fixed_bus[s] >= 0) m.fix(y[s * K + k], fixed_bus[s] == k ? 1.0 : 0.0);
    }
  }
  std::vector<Term> obj;
  for (int s = 0; s < S; ++s) {
    for (int s2 = 0; s2 < S; ++s2) {
      if (s == s2 || (fixed_bus[s] >= 0 && fixed_bus[s2] >= 0)) continue;
      for (int k = 0; k < K; ++k) {
        if (!allowed(s, k) || !allowed(s2, k)) continue;
        const int x = m.add_binary(cluster_names::x(s, s2, k));
        obj.push_back({x, delta[static_cast<std::size_t>(s) * S + s2]});
        m.add_constraint("pair_" + std::to_string(s) + "_" + std::to_string(s2) + "_" + std::to_string(k),
                         {{x, 1.0}, {y[s * K + k], -1.0}, {y[s2 * K + k], -1.0}}, Sense::ge, -1.0);
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    std::vector<Term> row;
    for (int k = 0; k < K; ++k) row.push_back({y[s * K + k], 1.0});
    m.add_constraint("assign_" + std::to_string(s), std::move(row), Sense::eq, 1.0);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<Term> row;
    for (int s = 0; s < S; ++s) row.push_back({y[s * K + k], 1.0});
    m.add_constraint("capacity_" + std::to_string(k), row, Sense::le, capacities[k]);
    m.add_constraint("nonempty_" + std::to_string(k), std::move(row), Sense::ge, 1.0);
  }
  m.set_objective(std::move(obj));
  return m;
}

double rna_objective(std::span<const int> bus_of, std::span<const double> delta) {
  const std::size_t S = bus_of.size();
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t s2 = 0; s2 < S; ++s2) {
      if (s != s2 && bus_of[s] == bus_of[s2]) total += delta[s * S + s2];
    }
  }
  return total;
}

MiloModel build_stop_min_model(int stops, const std::vector<std::vector<int>>& catchments) {
  MiloModel m("stop_min");
  std::vector<int> r(stops);
  std::vector<Term> obj;
  for (int i = 0; i < stops; ++i) {
    r[i] = m.add_binary(cluster_names::r(i));
    obj.push_back({r[i], 1.0});
  }
  for (std::size_t s = 0; s < catchments.size(); ++s) {
    if (catchments[s].empty()) {
      throw Error(ErrorKind::stranded_student, "student at position " + std::to_string(s) + " has no reachable stop");
    }
    std::vector<Term> row;
    for (int i : catchments[s]) {
      if (i < 0 || i >= stops) throw Error(ErrorKind::validation, "catchment stop out of range");
      const int e = m.add_binary(cluster_names::e(i, static_cast<int>(s)));
      row.push_back({e, 1.0});
      m.add_constraint("use_selected_" + std::to_string(i) + "_" + std::to_string(s), {{e, 1.0}, {r[i], -1.0}},
                       Sense::le, 0.0);
    }
    m.add_constraint("cover_" + std::to_string(s), std::move(row), Sense::eq, 1.0);
  }
  m.set_objective(std::move(obj));
  return m;
}

}  // namespace sbrsp::milp
