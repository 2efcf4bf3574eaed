#include "sscc/wkt.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace sscc {

namespace {

class WktReader {
 public:
  explicit WktReader(std::string_view text) : text_(text) {}

  WktShape read() {
    const std::string tag = keyword();
    WktShape shape;
    if (tag == "POINT") {
      shape.kind = GeometryKind::kPoint;
      expect('(');
      shape.parts.push_back({coordinate()});
      expect(')');
    } else if (tag == "LINESTRING") {
      shape.kind = GeometryKind::kLine;
      shape.parts.push_back(coordinate_list());
    } else if (tag == "POLYGON") {
      shape.kind = GeometryKind::kRegion;
      expect('(');
      shape.parts.push_back(coordinate_list());
      while (accept(',')) shape.parts.push_back(coordinate_list());
      expect(')');
    } else {
      fail("unsupported geometry type '" + tag + "'");
    }
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return shape;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw WktError("malformed WKT at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string keyword() {
    skip_space();
    std::string out;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_++]))));
    }
    if (out.empty()) fail("expected geometry type");
    return out;
  }

  double number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    // from_chars rejects a leading '+', which WKT writers do not emit anyway.
    double v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc::result_out_of_range) fail("coordinate out of range");
    if (ec != std::errc()) {
      // Accept the textual NaN/Inf spellings so the caller can reject them as invariant violations.
      std::string word;
      std::size_t p = pos_;
      if (p < text_.size() && (text_[p] == '-' || text_[p] == '+')) word.push_back(text_[p++]);
      while (p < text_.size() && std::isalpha(static_cast<unsigned char>(text_[p]))) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text_[p++]))));
      }
      const std::string_view w(word);
      const bool neg = !w.empty() && w[0] == '-';
      const std::string_view body = (!w.empty() && (w[0] == '-' || w[0] == '+')) ? w.substr(1) : w;
      if (body == "nan") {
        pos_ = p;
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (body == "inf" || body == "infinity") {
        pos_ = p;
        return neg ? -std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::infinity();
      }
      fail("expected number");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  Point coordinate() {
    const double x = number();
    const double y = number();
    return {x, y};
  }

  std::vector<Point> coordinate_list() {
    expect('(');
    std::vector<Point> pts{coordinate()};
    while (accept(',')) pts.push_back(coordinate());
    expect(')');
    return pts;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_ring(std::string& out, const std::vector<Point>& pts, bool close) {
  out += '(';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ", ";
    out += format_coordinate(pts[i].x);
    out += ' ';
    out += format_coordinate(pts[i].y);
  }
  if (close && !pts.empty()) {
    out += ", ";
    out += format_coordinate(pts.front().x);
    out += ' ';
    out += format_coordinate(pts.front().y);
  }
  out += ')';
}

}  // namespace

WktShape parse_wkt(std::string_view text) { return WktReader(text).read(); }

Geometry to_geometry(const WktShape& shape) {
  switch (shape.kind) {
    case GeometryKind::kPoint:
      return Geometry::point(shape.parts[0][0].x, shape.parts[0][0].y);
    case GeometryKind::kLine:
      return Geometry::line(shape.parts[0]);
    case GeometryKind::kRegion: {
      std::vector<Ring> holes(shape.parts.begin() + 1, shape.parts.end());
      return Geometry::region(shape.parts[0], std::move(holes));
    }
  }
  throw GeometryError("unknown geometry kind");
}

Geometry geometry_from_wkt(std::string_view text) { return to_geometry(parse_wkt(text)); }

std::string format_coordinate(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_wkt(const Geometry& g) {
  std::string out;
  switch (g.kind()) {
    case GeometryKind::kPoint:
      out = "POINT (" + format_coordinate(g.as_point().x) + " " + format_coordinate(g.as_point().y) +
            ")";
      break;
    case GeometryKind::kLine:
      out = "LINESTRING ";
      append_ring(out, g.as_line().vertices, false);
      break;
    case GeometryKind::kRegion: {
      out = "POLYGON (";
      const Region& r = g.as_region();
      append_ring(out, r.outer, true);
      for (const Ring& h : r.holes) {
        out += ", ";
        append_ring(out, h, true);
      }
      out += ')';
      break;
    }
  }
  return out;
}

}  // namespace sscc
