#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sscc/dataset.hpp"
#include "sscc/str_tree.hpp"

namespace sscc {

namespace {

struct Theme {
  const char* table;
  const char* label;
};

constexpr std::array<Theme, 10> kPointThemes{{{"Kinos", "cinema"},
                                              {"Restaurants", "restaurant"},
                                              {"Hotels", "hotel"},
                                              {"Schools", "school"},
                                              {"Hospitals", "hospital"},
                                              {"Museums", "museum"},
                                              {"Pharmacies", "pharmacy"},
                                              {"Banks", "bank"},
                                              {"Stations", "station"},
                                              {"Libraries", "library"}}};

constexpr std::array<Theme, 10> kLineThemes{{{"Strassen", "street"},
                                             {"Railways", "railway"},
                                             {"Rivers", "river"},
                                             {"Tramlines", "tram line"},
                                             {"Buslines", "bus line"},
                                             {"Canals", "canal"},
                                             {"Cycleways", "cycleway"},
                                             {"Powerlines", "power line"},
                                             {"Footpaths", "footpath"},
                                             {"Subways", "subway line"}}};

constexpr std::array<Theme, 10> kRegionThemes{{{"Bezirke", "district"},
                                               {"Parks", "park"},
                                               {"Lakes", "lake"},
                                               {"Forests", "forest"},
                                               {"Campuses", "campus"},
                                               {"Cemeteries", "cemetery"},
                                               {"Stadiums", "stadium"},
                                               {"Markets", "market"},
                                               {"Squares", "square"},
                                               {"Farmlands", "farmland"}}};

// Portable uniform doubles: std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t lo, std::size_t hi_inclusive) {
    return lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi_inclusive - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

double snap(double v) { return std::round(v * 100) / 100; }

Point random_point(Rng& rng, const BoundingBox& ext) {
  return {snap(rng.uniform(ext.min_x, ext.max_x)), snap(rng.uniform(ext.min_y, ext.max_y))};
}

Point clamp_into(Point p, const BoundingBox& ext) {
  return {std::clamp(p.x, ext.min_x, ext.max_x), std::clamp(p.y, ext.min_y, ext.max_y)};
}

Geometry random_line(Rng& rng, const BoundingBox& ext) {
  while (true) {
    const std::size_t n = rng.index(2, 8);
    std::vector<Point> pts{random_point(rng, ext)};
    double heading = rng.uniform(0, 2 * std::numbers::pi);
    while (pts.size() < n) {
      heading += rng.uniform(-0.8, 0.8);
      const double len = rng.uniform(50, 400);
      const Point prev = pts.back();
      Point next = clamp_into({prev.x + len * std::cos(heading), prev.y + len * std::sin(heading)}, ext);
      next = {snap(next.x), snap(next.y)};
      if (std::hypot(next.x - prev.x, next.y - prev.y) < 1) {
        heading += std::numbers::pi / 2;
        continue;
      }
      pts.push_back(next);
    }
    try {
      return Geometry::line(std::move(pts));
    } catch (const GeometryError&) {
    }
  }
}

Geometry random_region(Rng& rng, const BoundingBox& ext) {
  while (true) {
    const std::size_t n = rng.index(5, 10);
    const double radius =
        std::min({rng.uniform(50, 600), (ext.max_x - ext.min_x) / 2, (ext.max_y - ext.min_y) / 2});
    const double aspect = rng.uniform(0.5, 1.0);
    const double rotation = rng.uniform(0, std::numbers::pi);
    const Point c{rng.uniform(ext.min_x + radius, ext.max_x - radius),
                  rng.uniform(ext.min_y + radius, ext.max_y - radius)};
    std::vector<double> angles(n);
    for (double& a : angles) a = rng.uniform(0, 2 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    bool spread = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = i + 1 < n ? angles[i + 1] - angles[i] : angles[0] + 2 * std::numbers::pi - angles[i];
      if (gap < 0.05 || gap > std::numbers::pi * 0.9) spread = false;
    }
    if (!spread) continue;
    // Points on a rotated ellipse at increasing angles are in convex position.
    Ring ring;
    for (double a : angles) {
      const double ex = radius * std::cos(a);
      const double ey = radius * aspect * std::sin(a);
      const Point p{c.x + ex * std::cos(rotation) - ey * std::sin(rotation),
                    c.y + ex * std::sin(rotation) + ey * std::cos(rotation)};
      ring.push_back(clamp_into({snap(p.x), snap(p.y)}, ext));
    }
    try {
      return Geometry::region(std::move(ring));
    } catch (const GeometryError&) {
    }
  }
}

template <std::size_t N>
std::pair<std::string, std::string> theme_name(const std::array<Theme, N>& themes, std::size_t i) {
  const Theme& t = themes[i % N];
  if (i < N) return {t.table, t.label};
  return {std::string(t.table) + std::to_string(i / N + 1), t.label};
}

}  // namespace

Dataset synthesize_dataset(const SynthSpec& spec) {
  if (!(spec.extent.max_x > spec.extent.min_x && spec.extent.max_y > spec.extent.min_y)) {
    throw ConfigError("extent must have positive area");
  }
  const std::array<std::size_t, 3> counts{spec.n_points, spec.n_lines, spec.n_regions};
  std::array<std::size_t, 3> tables_per_kind{0, 0, 0};
  const std::size_t nonempty = static_cast<std::size_t>(std::count_if(
      counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  std::size_t n_tables = spec.n_tables == 0 ? nonempty : spec.n_tables;
  if (n_tables < nonempty) throw ConfigError("table count below number of non-empty geometry kinds");
  if (n_tables > spec.n_points + spec.n_lines + spec.n_regions) {
    throw ConfigError("more tables than entities");
  }
  // Round-robin over kinds so tables spread as evenly as the counts allow.
  for (std::size_t assigned = 0; assigned < n_tables;) {
    for (std::size_t k = 0; k < 3 && assigned < n_tables; ++k) {
      if (tables_per_kind[k] < counts[k]) {
        ++tables_per_kind[k];
        ++assigned;
      }
    }
  }

  Rng rng(spec.seed);
  std::vector<Table> tables;
  EntityId next_id = 1;
  const std::array<char, 3> prefix{'P', 'L', 'R'};
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t nt = tables_per_kind[k];
    std::size_t serial = 1;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      Table t;
      t.kind = static_cast<GeometryKind>(k);
      auto [name, label] = k == 0   ? theme_name(kPointThemes, ti)
                           : k == 1 ? theme_name(kLineThemes, ti)
                                    : theme_name(kRegionThemes, ti);
      t.name = name;
      t.label = label;
      const std::size_t members = counts[k] / nt + (ti < counts[k] % nt ? 1 : 0);
      for (std::size_t m = 0; m < members; ++m) {
        Entity e;
        e.id = next_id++;
        e.name = prefix[k] + std::to_string(serial++);
        e.table = t.name;
        switch (t.kind) {
          case GeometryKind::kPoint: {
            const Point p = random_point(rng, spec.extent);
            e.geometry = Geometry::point(p.x, p.y);
            e.attributes["rating"] = std::to_string(rng.index(1, 5));
            break;
          }
          case GeometryKind::kLine:
            e.geometry = random_line(rng, spec.extent);
            break;
          case GeometryKind::kRegion:
            e.geometry = random_region(rng, spec.extent);
            break;
        }
        t.entities.push_back(std::move(e));
      }
      tables.push_back(std::move(t));
    }
  }
  return Dataset("synthetic-" + std::to_string(spec.seed), "synthetic planar coordinates in meters",
                 std::move(tables));
}

SynthSpec berlin_profile(std::uint64_t seed) {
  SynthSpec s;
  s.seed = seed;
  s.n_points = 1898;
  s.n_lines = 4356;
  s.n_regions = 261;
  s.n_tables = 24;
  s.extent = {0, 0, 30'000, 30'000};
  return s;
}

SynthSpec nanjing_profile(std::uint64_t seed) {
  SynthSpec s;
  s.seed = seed;
  s.n_points = 2321;
  s.n_lines = 8407;
  s.n_regions = 1942;
  s.n_tables = 18;
  s.extent = {0, 0, 40'000, 40'000};
  return s;
}

}  // namespace sscc
