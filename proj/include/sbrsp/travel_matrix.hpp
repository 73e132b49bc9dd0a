#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sbrsp/network.hpp"

namespace sbrsp {

enum class ArcClass {
  none,
  origin_stop,    // O -> stop, zero cost
  stop_stop,
  stop_school,
  school_school,
  school_stop,
  school_dest,    // school -> D, zero cost
};

// Bus travel times over N' = {O} ∪ stops ∪ schools ∪ {D}. Node 0 is O, then
// stops, then schools, then D.
class TravelTimeMatrix {
 public:
  TravelTimeMatrix() = default;
  // `physical` is row-major over stops then schools.
  TravelTimeMatrix(int stops, int schools, std::vector<double> physical);

  int stop_count() const { return n_; }
  int school_count() const { return m_; }
  int size() const { return n_ + m_ + 2; }
  int origin() const { return 0; }
  int stop(int i) const { return 1 + i; }
  int school(int m) const { return 1 + n_ + m; }
  int destination() const { return n_ + m_ + 1; }
  bool is_stop(int node) const { return node >= 1 && node <= n_; }
  bool is_school(int node) const { return node > n_ && node <= n_ + m_; }

  ArcClass arc_class(int i, int j) const;
  // Δ_ij for a modeled arc; 0 on O->stop and school->D arcs.
  double operator()(int i, int j) const;
  // Supply Q_i: +1 at O, -1 at D.
  int supply(int i) const;
  std::vector<std::pair<int, int>> arcs(ArcClass c) const;

  // Time between physical points (stops then schools, zero based).
  double physical(int a, int b) const { return phys_[static_cast<std::size_t>(a) * (n_ + m_) + b]; }

  // Same schools, a subset of stops in the given order.
  TravelTimeMatrix restrict(std::span<const int> stops) const;
  // Subsets of stops and schools, each in the given order.
  TravelTimeMatrix restrict(std::span<const int> stops, std::span<const int> schools) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> phys_;
};

// Shortest bus times between every ordered pair of stops and schools.
// Throws a disconnected error listing unreachable pairs.
TravelTimeMatrix build_travel_matrix(const RoadNetwork& net, std::span<const NetworkLocation> stops,
                                     std::span<const NetworkLocation> schools, std::span<const double> arc_times = {});

}  // namespace sbrsp
