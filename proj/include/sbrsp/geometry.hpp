#pragma once

#include <span>
#include <vector>

namespace sbrsp {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);
double squared_distance(Point a, Point b);
double distance_to_segment(Point p, Point a, Point b);

enum class RegionShape { point, segment, polygon };

// Convex region as a counterclockwise vertex ring. A point region has one
// vertex, a segment region two.
struct Region {
  std::vector<Point> ring;
  RegionShape shape = RegionShape::point;
};

inline constexpr double kMembershipTolerance = 1e-6;

Region convex_hull(std::span<const Point> points);

// Outward buffer by `distance`. Corner arcs are approximated by circumscribed
// polygon pieces so the result always contains the exact buffer; the outward
// overshoot stays below half a meter.
Region expand_region(const Region& region, double distance);

// Boundary-inclusive.
bool contains(const Region& region, Point p, double tolerance = kMembershipTolerance);

double distance_to_region(const Region& region, Point p);

Point centroid_of(std::span<const Point> points);

}  // namespace sbrsp
