#include "sbrsp/travel_matrix.hpp"

#include <cmath>
#include <string>

#include "sbrsp/error.hpp"

namespace sbrsp {

TravelTimeMatrix::TravelTimeMatrix(int stops, int schools, std::vector<double> physical)
    : n_(stops), m_(schools), phys_(std::move(physical)) {
  if (phys_.size() != static_cast<std::size_t>((n_ + m_) * (n_ + m_))) {
    throw Error(ErrorKind::validation, "travel matrix size mismatch");
  }
}

ArcClass TravelTimeMatrix::arc_class(int i, int j) const {
  if (i == j) return ArcClass::none;
  if (i == origin()) return is_stop(j) ? ArcClass::origin_stop : ArcClass::none;
  if (is_stop(i)) {
    if (is_stop(j)) return ArcClass::stop_stop;
    if (is_school(j)) return ArcClass::stop_school;
    return ArcClass::none;
  }
  if (is_school(i)) {
    if (is_school(j)) return ArcClass::school_school;
    if (is_stop(j)) return ArcClass::school_stop;
    if (j == destination()) return ArcClass::school_dest;
  }
  return ArcClass::none;
}

double TravelTimeMatrix::operator()(int i, int j) const {
  switch (arc_class(i, j)) {
    case ArcClass::origin_stop:
    case ArcClass::school_dest:
      return 0.0;
    case ArcClass::none:
      return INFINITY;
    default:
      return physical(i - 1, j - 1);
  }
}

int TravelTimeMatrix::supply(int i) const {
  if (i == origin()) return 1;
  if (i == destination()) return -1;
  return 0;
}

std::vector<std::pair<int, int>> TravelTimeMatrix::arcs(ArcClass c) const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (arc_class(i, j) == c) out.emplace_back(i, j);
    }
  }
  return out;
}

TravelTimeMatrix TravelTimeMatrix::restrict(std::span<const int> stops) const {
  std::vector<int> all(m_);
  for (int m = 0; m < m_; ++m) all[m] = m;
  return restrict(stops, all);
}

TravelTimeMatrix TravelTimeMatrix::restrict(std::span<const int> stops, std::span<const int> schools) const {
  std::vector<int> idx(stops.begin(), stops.end());
  for (int m : schools) idx.push_back(n_ + m);
  const std::size_t k = idx.size();
  std::vector<double> sub(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) sub[a * k + b] = physical(idx[a], idx[b]);
  }
  return TravelTimeMatrix(static_cast<int>(stops.size()), static_cast<int>(schools.size()), std::move(sub));
}

TravelTimeMatrix build_travel_matrix(const RoadNetwork& net, std::span<const NetworkLocation> stops,
                                     std::span<const NetworkLocation> schools, std::span<const double> arc_times) {
  std::vector<double> ff;
  if (arc_times.empty()) {
    ff = net.freeflow_times();
    arc_times = ff;
  }
  std::vector<NetworkLocation> pts(stops.begin(), stops.end());
  pts.insert(pts.end(), schools.begin(), schools.end());
  const std::size_t k = pts.size();
  const int n = static_cast<int>(stops.size());
  auto label = [&](std::size_t i) {
    return static_cast<int>(i) < n ? "stop#" + std::to_string(i) : "school#" + std::to_string(i - n);
  };
  std::vector<double> phys(k * k, 0.0);
  std::string cut;
  int missing = 0;
  for (std::size_t a = 0; a < k; ++a) {
    ShortestPathTree tree(net, pts[a], arc_times, SearchMode::forward);
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const double t = tree.cost_to(pts[b]);
      if (!std::isfinite(t)) {
        if (missing < 10) cut += (cut.empty() ? "" : ", ") + label(a) + "->" + label(b);
        ++missing;
      }
      phys[a * k + b] = t;
    }
  }
  if (missing > 0) {
    throw Error(ErrorKind::disconnected, std::to_string(missing) + " unreachable stop/school pairs: " + cut +
                                             (missing > 10 ? ", ..." : ""));
  }
  return TravelTimeMatrix(n, static_cast<int>(schools.size()), std::move(phys));
}

}  // namespace sbrsp
