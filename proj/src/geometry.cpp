#include "sbrsp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sbrsp/error.hpp"

namespace sbrsp {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

constexpr double kMaxOvershoot = 0.5;

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance_to_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point{a.x + t * dx, a.y + t * dy});
}

Region convex_hull(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorKind::validation, "convex hull of an empty point set");
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Region out;
  if (pts.size() == 1) {
    out.ring = pts;
    out.shape = RegionShape::point;
    return out;
  }

  // Andrew's monotone chain; collinear points are dropped.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  if (hull.size() <= 2) {
    out.ring = {pts.front(), pts.back()};
    out.shape = RegionShape::segment;
  } else {
    out.ring = std::move(hull);
    out.shape = RegionShape::polygon;
  }
  return out;
}

bool contains(const Region& region, Point p, double tolerance) {
  const auto& r = region.ring;
  if (r.empty()) return false;
  switch (region.shape) {
    case RegionShape::point:
      return distance(p, r[0]) <= tolerance;
    case RegionShape::segment:
      return distance_to_segment(p, r[0], r[1]) <= tolerance;
    case RegionShape::polygon:
      break;
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point a = r[i];
    const Point b = r[(i + 1) % r.size()];
    const double len = distance(a, b);
    // Signed distance to the left of edge a->b; negative means outside.
    const double side = cross(a, b, p) / len;
    if (side < -tolerance) return false;
  }
  return true;
}

double distance_to_region(const Region& region, Point p) {
  if (contains(region, p, 0.0)) return 0.0;
  const auto& r = region.ring;
  if (r.size() == 1) return distance(p, r[0]);
  double best = INFINITY;
  for (std::size_t i = 0; i < r.size(); ++i) {
    best = std::min(best, distance_to_segment(p, r[i], r[(i + 1) % r.size()]));
  }
  return best;
}

Region expand_region(const Region& region, double d) {
  if (d < 0) throw Error(ErrorKind::validation, "negative buffer distance");
  if (region.ring.empty()) throw Error(ErrorKind::validation, "buffer of an empty region");
  if (d == 0) return region;

  // Outward normal directions swept at each vertex. For a point the whole
  // circle; for a segment two half circles; for a polygon the exterior angle.
  struct Corner {
    Point at;
    double start;
    double sweep;
  };
  std::vector<Corner> corners;
  const auto& r = region.ring;
  const double pi = std::numbers::pi;
  if (region.shape == RegionShape::point) {
    corners.push_back({r[0], 0.0, 2 * pi});
  } else if (region.shape == RegionShape::segment) {
    const double a = std::atan2(r[1].y - r[0].y, r[1].x - r[0].x);
    corners.push_back({r[1], a - pi / 2, pi});
    corners.push_back({r[0], a + pi / 2, pi});
  } else {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point prev = r[(i + n - 1) % n];
      const Point cur = r[i];
      const Point next = r[(i + 1) % n];
      // Outward normal of a CCW edge (dx, dy) is (dy, -dx).
      const double in_dir = std::atan2(cur.y - prev.y, cur.x - prev.x) - pi / 2;
      const double out_dir = std::atan2(next.y - cur.y, next.x - cur.x) - pi / 2;
      double sweep = out_dir - in_dir;
      while (sweep < 0) sweep += 2 * pi;
      while (sweep >= 2 * pi) sweep -= 2 * pi;
      corners.push_back({cur, in_dir, sweep});
    }
  }

  // Circumscribed pieces: a step of angle h places vertices at radius d/cos(h/2).
  const double max_step = 2.0 * std::acos(d / (d + kMaxOvershoot));
  std::vector<Point> pts;
  for (const auto& c : corners) {
    int steps = std::max(8, static_cast<int>(std::ceil(c.sweep / max_step)));
    if (c.sweep == 0) steps = 1;
    const double h = c.sweep / steps;
    const double radius = d / std::cos(h / 2);
    // End points of the arc sit exactly at distance d along the edge normals;
    // interior vertices sit at the circumscribed radius at half-step angles.
    pts.push_back({c.at.x + d * std::cos(c.start), c.at.y + d * std::sin(c.start)});
    for (int s = 0; s < steps; ++s) {
      const double ang = c.start + (s + 0.5) * h;
      pts.push_back({c.at.x + radius * std::cos(ang), c.at.y + radius * std::sin(ang)});
    }
    const double end = c.start + c.sweep;
    pts.push_back({c.at.x + d * std::cos(end), c.at.y + d * std::sin(end)});
  }
  return convex_hull(pts);
}

Point centroid_of(std::span<const Point> points) {
  Point c;
  if (points.empty()) return c;
  for (const auto& p : points) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(points.size());
  c.y /= static_cast<double>(points.size());
  return c;
}

}  // namespace sbrsp
