#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sscc/geometry.hpp"

namespace sscc {

class WktError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw coordinates as written in the text, before any repair or validation.
struct WktShape {
  GeometryKind kind = GeometryKind::kPoint;
  std::vector<std::vector<Point>> parts;  // point: 1x1, line: 1xN, polygon: rings
};

/// Parses the POINT / LINESTRING / POLYGON subset. Throws WktError on malformed text.
WktShape parse_wkt(std::string_view text);

/// Builds a validated geometry from a parsed shape. Throws GeometryError.
Geometry to_geometry(const WktShape& shape);

/// Parses and validates in one step.
Geometry geometry_from_wkt(std::string_view text);

/// Shortest round-tripping rendering; polygons are written with explicitly closed rings.
std::string to_wkt(const Geometry& g);

/// Shortest decimal representation that parses back to the same double.
std::string format_coordinate(double v);

}  // namespace sscc
