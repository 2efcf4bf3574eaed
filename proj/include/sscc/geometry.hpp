#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sscc {

/// Agreement tolerance for predicates and measures, in meters.
inline constexpr double kTolerance = 1e-9;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BoundingBox {
  double min_x = 0;
  double min_y = 0;
  double max_x = 0;
  double max_y = 0;

  static BoundingBox of(Point p) { return {p.x, p.y, p.x, p.y}; }
  static BoundingBox of(std::span<const Point> pts);

  bool intersects(const BoundingBox& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  bool contains(const BoundingBox& o) const {
    return min_x <= o.min_x && min_y <= o.min_y && o.max_x <= max_x && o.max_y <= max_y;
  }
  /// Minimum distance between the two boxes (0 when they overlap).
  double distance(const BoundingBox& o) const;
  BoundingBox expanded(double by) const {
    return {min_x - by, min_y - by, max_x + by, max_y + by};
  }
  void extend(const BoundingBox& o);
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
  bool valid() const { return min_x <= max_x && min_y <= max_y; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Ordered vertex chain with at least two vertices and no repeated consecutive vertex.
struct Polyline {
  std::vector<Point> vertices;

  friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// A ring is stored open: the closing edge from back() to front() is implied.
using Ring = std::vector<Point>;

/// Simple polygon with optional holes. Outer ring is counter-clockwise, holes clockwise.
struct Region {
  Ring outer;
  std::vector<Ring> holes;

  friend bool operator==(const Region&, const Region&) = default;
};

enum class GeometryKind { kPoint, kLine, kRegion };

std::string_view to_string(GeometryKind kind);
GeometryKind parse_geometry_kind(std::string_view text);

/// Validated, immutable geometry value. Construction goes through the factories,
/// which enforce the per-kind invariants and throw GeometryError otherwise.
class Geometry {
 public:
  static Geometry point(double x, double y);
  static Geometry line(std::vector<Point> vertices);
  static Geometry region(Ring outer, std::vector<Ring> holes = {});

  GeometryKind kind() const { return static_cast<GeometryKind>(value_.index()); }
  const BoundingBox& bbox() const { return bbox_; }

  bool is_point() const { return kind() == GeometryKind::kPoint; }
  bool is_line() const { return kind() == GeometryKind::kLine; }
  bool is_region() const { return kind() == GeometryKind::kRegion; }

  const Point& as_point() const { return std::get<Point>(value_); }
  const Polyline& as_line() const { return std::get<Polyline>(value_); }
  const Region& as_region() const { return std::get<Region>(value_); }

  friend bool operator==(const Geometry& a, const Geometry& b) { return a.value_ == b.value_; }

 private:
  using Value = std::variant<Point, Polyline, Region>;
  explicit Geometry(Value v);

  Value value_;
  BoundingBox bbox_;
};

/// Signed area of a ring (positive when counter-clockwise).
double signed_area(std::span<const Point> ring);
/// Area of a region, holes subtracted.
double area(const Region& region);

/// Minimum Euclidean distance between the point sets of a and b.
double distance(const Geometry& a, const Geometry& b);
/// True iff the point sets share at least one point.
bool intersects(const Geometry& a, const Geometry& b);
/// True iff every point of a lies in b (boundary inclusive). b must be a region.
bool inside(const Geometry& a, const Geometry& b);
/// area(a ∩ b) / min(area(a), area(b)).
double overlap_ratio(const Region& a, const Region& b);
double overlap_ratio(const Geometry& a, const Geometry& b);
/// Area of the intersection of two regions.
double intersection_area(const Region& a, const Region& b);

/// Closed point-in-region test (on the boundary counts as inside).
bool contains_point(const Region& region, Point p);

}  // namespace sscc
