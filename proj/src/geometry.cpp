#include "sscc/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sscc {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Parameter of the projection of p onto line ab, clamped to [0, 1].
double project(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0) return 0;
  return std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
}

Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

double point_segment_distance(Point p, Point a, Point b) {
  return dist(p, lerp(a, b, project(p, a, b)));
}

bool opposite(double u, double v) { return (u > 0 && v < 0) || (u < 0 && v > 0); }

bool segments_intersect(Point a, Point b, Point c, Point d) {
  if (opposite(cross(c, d, a), cross(c, d, b)) && opposite(cross(a, b, c), cross(a, b, d))) {
    return true;
  }
  return point_segment_distance(a, c, d) <= kTolerance ||
         point_segment_distance(b, c, d) <= kTolerance ||
         point_segment_distance(c, a, b) <= kTolerance ||
         point_segment_distance(d, a, b) <= kTolerance;
}

double segment_distance(Point a, Point b, Point c, Point d) {
  if (segments_intersect(a, b, c, d)) return 0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

template <typename F>
void for_each_ring_edge(const Ring& ring, F&& f) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) f(ring[i], ring[(i + 1) % n]);
}

template <typename F>
void for_each_region_edge(const Region& r, F&& f) {
  for_each_ring_edge(r.outer, f);
  for (const Ring& h : r.holes) for_each_ring_edge(h, f);
}

// Visits every segment of a geometry; a point is a single degenerate segment.
template <typename F>
void for_each_segment(const Geometry& g, F&& f) {
  switch (g.kind()) {
    case GeometryKind::kPoint:
      f(g.as_point(), g.as_point());
      break;
    case GeometryKind::kLine: {
      const auto& v = g.as_line().vertices;
      for (std::size_t i = 0; i + 1 < v.size(); ++i) f(v[i], v[i + 1]);
      break;
    }
    case GeometryKind::kRegion:
      for_each_region_edge(g.as_region(), f);
      break;
  }
}

Point first_vertex(const Geometry& g) {
  switch (g.kind()) {
    case GeometryKind::kPoint:
      return g.as_point();
    case GeometryKind::kLine:
      return g.as_line().vertices.front();
    case GeometryKind::kRegion:
      return g.as_region().outer.front();
  }
  return {};
}

// Strict crossing-number test; boundary points give an unspecified answer.
bool in_ring(const Ring& ring, Point p) {
  bool in = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = ring[i];
    const Point b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

bool on_ring(const Ring& ring, Point p) {
  bool on = false;
  for_each_ring_edge(ring, [&](Point a, Point b) {
    if (!on && point_segment_distance(p, a, b) <= kTolerance) on = true;
  });
  return on;
}

bool on_boundary(const Region& r, Point p) {
  if (on_ring(r.outer, p)) return true;
  return std::any_of(r.holes.begin(), r.holes.end(), [&](const Ring& h) { return on_ring(h, p); });
}

// Closed containment of segment pq: split pq at every contact with the region
// boundary and test each piece by its midpoint.
bool segment_in_region(Point p, Point q, const Region& r) {
  std::vector<double> ts{0.0, 1.0};
  for_each_region_edge(r, [&](Point c, Point d) {
    if (!segments_intersect(p, q, c, d)) return;
    const double dc = cross(p, q, c);
    const double dd = cross(p, q, d);
    if (dc != dd) {
      const double t_cross = cross(c, d, p) / (cross(c, d, p) - cross(c, d, q));
      if (std::isfinite(t_cross)) ts.push_back(std::clamp(t_cross, 0.0, 1.0));
    }
    if (point_segment_distance(c, p, q) <= kTolerance) ts.push_back(project(c, p, q));
    if (point_segment_distance(d, p, q) <= kTolerance) ts.push_back(project(d, p, q));
  });
  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!contains_point(r, lerp(p, q, ts[i]))) return false;
    if (i + 1 < ts.size() && ts[i + 1] - ts[i] > 0 &&
        !contains_point(r, lerp(p, q, (ts[i] + ts[i + 1]) / 2))) {
      return false;
    }
  }
  return true;
}

bool ring_in_region(const Ring& ring, const Region& r) {
  bool ok = true;
  for_each_ring_edge(ring, [&](Point a, Point b) {
    if (ok && !segment_in_region(a, b, r)) ok = false;
  });
  return ok;
}

bool rings_intersect(const Ring& a, const Ring& b) {
  bool hit = false;
  for_each_ring_edge(a, [&](Point p, Point q) {
    if (hit) return;
    for_each_ring_edge(b, [&](Point c, Point d) {
      if (!hit && segments_intersect(p, q, c, d)) hit = true;
    });
  });
  if (hit) return true;
  return in_ring(b, a.front()) || in_ring(a, b.front());
}

void require_finite(Point p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw GeometryError("non-finite coordinate");
  }
}

Ring normalize_ring(Ring ring, bool counter_clockwise) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  for (Point p : ring) require_finite(p);
  if (ring.size() < 3) throw GeometryError("ring needs at least 3 distinct vertices");
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (ring[i] == ring[(i + 1) % ring.size()]) {
      throw GeometryError("ring has repeated consecutive vertices");
    }
  }
  const double a = signed_area(ring);
  if (!(std::abs(a) > 0)) throw GeometryError("ring has zero area");
  if ((a > 0) != counter_clockwise) std::reverse(ring.begin(), ring.end());

  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a0 = ring[i];
    const Point a1 = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point b0 = ring[j];
      const Point b1 = ring[(j + 1) % n];
      const bool next = j == i + 1;
      const bool wrap = i == 0 && j == n - 1;
      if (next) {
        // Adjacent edges share a1 == b0; they must not fold back onto each other.
        if (point_segment_distance(b1, a0, a1) <= kTolerance ||
            point_segment_distance(a0, b0, b1) <= kTolerance) {
          throw GeometryError("ring is not simple");
        }
      } else if (wrap) {
        if (point_segment_distance(b0, a0, a1) <= kTolerance ||
            point_segment_distance(a1, b0, b1) <= kTolerance) {
          throw GeometryError("ring is not simple");
        }
      } else if (segments_intersect(a0, a1, b0, b1)) {
        throw GeometryError("ring is not simple");
      }
    }
  }
  return ring;
}

// Area of the intersection of two convex polygons given counter-clockwise.
double convex_intersection_area(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> out(subject.begin(), subject.end());
  std::vector<Point> in;
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    const Point c0 = clip[i];
    const Point c1 = clip[(i + 1) % n];
    in.swap(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Point p = in[j];
      const Point q = in[(j + 1) % in.size()];
      const double sp = cross(c0, c1, p);
      const double sq = cross(c0, c1, q);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) out.push_back(lerp(p, q, sp / (sp - sq)));
    }
  }
  if (out.size() < 3) return 0;
  return std::max(0.0, signed_area(out));
}

struct FanTriangle {
  std::array<Point, 3> corners;  // counter-clockwise
  double sign;
  BoundingBox box;
};

// Decomposes a region into signed triangles over a shared apex; the signed sum
// of their indicator functions equals the region's indicator almost everywhere.
std::vector<FanTriangle> fan(const Region& r, Point apex) {
  std::vector<FanTriangle> tris;
  for_each_region_edge(r, [&](Point a, Point b) {
    const double s = cross(apex, a, b);
    if (s == 0) return;
    FanTriangle t;
    t.corners = s > 0 ? std::array<Point, 3>{apex, a, b} : std::array<Point, 3>{apex, b, a};
    t.sign = s > 0 ? 1.0 : -1.0;
    t.box = BoundingBox::of(t.corners);
    tris.push_back(t);
  });
  return tris;
}

}  // namespace

BoundingBox BoundingBox::of(std::span<const Point> pts) {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (Point p : pts) b.extend(of(p));
  return b;
}

double BoundingBox::distance(const BoundingBox& o) const {
  const double dx = std::max({0.0, o.min_x - max_x, min_x - o.max_x});
  const double dy = std::max({0.0, o.min_y - max_y, min_y - o.max_y});
  return std::hypot(dx, dy);
}

void BoundingBox::extend(const BoundingBox& o) {
  min_x = std::min(min_x, o.min_x);
  min_y = std::min(min_y, o.min_y);
  max_x = std::max(max_x, o.max_x);
  max_y = std::max(max_y, o.max_y);
}

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::kPoint:
      return "point";
    case GeometryKind::kLine:
      return "line";
    case GeometryKind::kRegion:
      return "region";
  }
  return "?";
}

GeometryKind parse_geometry_kind(std::string_view text) {
  if (text == "point") return GeometryKind::kPoint;
  if (text == "line") return GeometryKind::kLine;
  if (text == "region") return GeometryKind::kRegion;
  throw GeometryError("unknown geometry kind '" + std::string(text) + "'");
}

Geometry::Geometry(Value v) : value_(std::move(v)) {
  switch (kind()) {
    case GeometryKind::kPoint:
      bbox_ = BoundingBox::of(as_point());
      break;
    case GeometryKind::kLine:
      bbox_ = BoundingBox::of(as_line().vertices);
      break;
    case GeometryKind::kRegion:
      bbox_ = BoundingBox::of(as_region().outer);
      break;
  }
}

Geometry Geometry::point(double x, double y) {
  require_finite({x, y});
  return Geometry(Point{x, y});
}

Geometry Geometry::line(std::vector<Point> vertices) {
  if (vertices.size() < 2) throw GeometryError("polyline needs at least 2 vertices");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    require_finite(vertices[i]);
    if (i > 0 && vertices[i] == vertices[i - 1]) {
      throw GeometryError("polyline has repeated consecutive vertices");
    }
  }
  return Geometry(Polyline{std::move(vertices)});
}

Geometry Geometry::region(Ring outer, std::vector<Ring> holes) {
  Region r;
  r.outer = normalize_ring(std::move(outer), true);
  const Region shell{r.outer, {}};
  for (Ring& h : holes) {
    Ring ring = normalize_ring(std::move(h), false);
    if (!ring_in_region(ring, shell)) throw GeometryError("hole is not inside the outer ring");
    for (const Ring& other : r.holes) {
      if (rings_intersect(ring, other)) throw GeometryError("holes are not disjoint");
    }
    r.holes.push_back(std::move(ring));
  }
  return Geometry(std::move(r));
}

double signed_area(std::span<const Point> ring) {
  double s = 0;
  const std::size_t n = ring.size();
  if (n < 3) return 0;
  const Point o = ring[0];
  for (std::size_t i = 1; i + 1 < n; ++i) s += cross(o, ring[i], ring[i + 1]);
  return s / 2;
}

double area(const Region& region) {
  double a = std::abs(signed_area(region.outer));
  for (const Ring& h : region.holes) a -= std::abs(signed_area(h));
  return a;
}

bool contains_point(const Region& region, Point p) {
  if (on_boundary(region, p)) return true;
  if (!in_ring(region.outer, p)) return false;
  return std::none_of(region.holes.begin(), region.holes.end(),
                      [&](const Ring& h) { return in_ring(h, p); });
}

bool intersects(const Geometry& a, const Geometry& b) {
  if (!a.bbox().expanded(kTolerance).intersects(b.bbox())) return false;
  bool hit = false;
  for_each_segment(a, [&](Point p, Point q) {
    if (hit) return;
    for_each_segment(b, [&](Point c, Point d) {
      if (!hit && segments_intersect(p, q, c, d)) hit = true;
    });
  });
  if (hit) return true;
  // No boundary contact: one geometry can only meet the other by lying in its interior.
  if (b.is_region() && contains_point(b.as_region(), first_vertex(a))) return true;
  if (a.is_region() && contains_point(a.as_region(), first_vertex(b))) return true;
  return false;
}

double distance(const Geometry& a, const Geometry& b) {
  if (intersects(a, b)) return 0;
  double best = std::numeric_limits<double>::infinity();
  for_each_segment(a, [&](Point p, Point q) {
    for_each_segment(b, [&](Point c, Point d) {
      best = std::min(best, segment_distance(p, q, c, d));
    });
  });
  return best;
}

bool inside(const Geometry& a, const Geometry& b) {
  if (!b.is_region()) throw GeometryError("invalid containment target");
  const Region& target = b.as_region();
  if (!b.bbox().expanded(kTolerance).contains(a.bbox())) return false;
  switch (a.kind()) {
    case GeometryKind::kPoint:
      return contains_point(target, a.as_point());
    case GeometryKind::kLine: {
      const auto& v = a.as_line().vertices;
      for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!segment_in_region(v[i], v[i + 1], target)) return false;
      }
      return true;
    }
    case GeometryKind::kRegion: {
      const Region& inner = a.as_region();
      if (!ring_in_region(inner.outer, target)) return false;
      // A hole of the target that sits within inner's shell must be covered by one of inner's holes.
      for (const Ring& h : target.holes) {
        const bool enclosed = std::any_of(h.begin(), h.end(), [&](Point p) {
          return in_ring(inner.outer, p) && !on_ring(inner.outer, p);
        });
        if (!enclosed) continue;
        const bool covered = std::any_of(inner.holes.begin(), inner.holes.end(), [&](const Ring& g) {
          const Region hole_region{g, {}};
          return std::all_of(h.begin(), h.end(),
                             [&](Point p) { return contains_point(hole_region, p); });
        });
        if (!covered) return false;
      }
      return true;
    }
  }
  return false;
}

double intersection_area(const Region& a, const Region& b) {
  const Point apex = a.outer.front();
  const auto fa = fan(a, apex);
  const auto fb = fan(b, apex);
  double total = 0;
  for (const FanTriangle& ta : fa) {
    for (const FanTriangle& tb : fb) {
      if (!ta.box.intersects(tb.box)) continue;
      total += ta.sign * tb.sign * convex_intersection_area(ta.corners, tb.corners);
    }
  }
  return std::max(0.0, total);
}

double overlap_ratio(const Region& a, const Region& b) {
  const double area_a = area(a);
  const double area_b = area(b);
  if (!(area_a > 0) || !(area_b > 0)) throw GeometryError("degenerate region");
  const BoundingBox ba = BoundingBox::of(a.outer);
  const BoundingBox bb = BoundingBox::of(b.outer);
  if (!ba.intersects(bb)) return 0;
  return std::clamp(intersection_area(a, b) / std::min(area_a, area_b), 0.0, 1.0);
}

double overlap_ratio(const Geometry& a, const Geometry& b) {
  if (!a.is_region() || !b.is_region()) throw GeometryError("degenerate region");
  return overlap_ratio(a.as_region(), b.as_region());
}

}  // namespace sscc
