#include "sscc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

#include <json.hpp>

#include "sscc/csv.hpp"
#include "sscc/io.hpp"
#include "sscc/wkt.hpp"

namespace sscc {

namespace fs = std::filesystem;
using nlohmann::json;

Dataset::Dataset(std::string name, std::string crs_note, std::vector<Table> tables)
    : name_(std::move(name)), crs_note_(std::move(crs_note)), tables_(std::move(tables)) {
  std::set<std::string> seen_tables;
  for (std::size_t ti = 0; ti < tables_.size(); ++ti) {
    Table& t = tables_[ti];
    if (!seen_tables.insert(t.name).second) throw DatasetError("duplicate table '" + t.name + "'");
    if (t.label.empty()) t.label = t.name;
    for (std::size_t ei = 0; ei < t.entities.size(); ++ei) {
      const Entity& e = t.entities[ei];
      if (e.table != t.name) {
        throw DatasetError("entity " + std::to_string(e.id) + " claims table '" + e.table +
                           "' but is stored in '" + t.name + "'");
      }
      if (e.name.empty()) throw DatasetError("entity " + std::to_string(e.id) + " has no name");
      if (e.geometry.kind() != t.kind) {
        throw DatasetError("entity " + std::to_string(e.id) + " is a " +
                           std::string(to_string(e.geometry.kind())) + " in " +
                           std::string(to_string(t.kind)) + " table '" + t.name + "'");
      }
      if (!by_id_.emplace(e.id, std::pair{ti, ei}).second) {
        throw DatasetError("duplicate entity id " + std::to_string(e.id));
      }
      by_name_[e.name].push_back(e.id);
    }
  }
  for (auto& [_, ids] : by_name_) std::sort(ids.begin(), ids.end());
}

const Table* Dataset::find_table(std::string_view name) const {
  for (const Table& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Entity* Dataset::find_entity(EntityId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &tables_[it->second.first].entities[it->second.second];
}

const Entity& Dataset::entity(EntityId id) const {
  const Entity* e = find_entity(id);
  if (!e) throw DatasetError("unknown entity id " + std::to_string(id));
  return *e;
}

const Table& Dataset::table_of(EntityId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw DatasetError("unknown entity id " + std::to_string(id));
  return tables_[it->second.first];
}

std::vector<const Entity*> Dataset::entities_named(std::string_view name) const {
  std::vector<const Entity*> out;
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return out;
  for (EntityId id : it->second) out.push_back(find_entity(id));
  return out;
}

DatasetStats& DatasetStats::operator+=(const DatasetStats& o) {
  n_tables += o.n_tables;
  n_points += o.n_points;
  n_lines += o.n_lines;
  n_regions += o.n_regions;
  n_entities += o.n_entities;
  return *this;
}

DatasetStats table_stats(const Table& t) {
  DatasetStats s;
  s.n_tables = 1;
  for (const Entity& e : t.entities) {
    switch (e.geometry.kind()) {
      case GeometryKind::kPoint:
        ++s.n_points;
        break;
      case GeometryKind::kLine:
        ++s.n_lines;
        break;
      case GeometryKind::kRegion:
        ++s.n_regions;
        break;
    }
  }
  s.n_entities = s.n_points + s.n_lines + s.n_regions;
  return s;
}

DatasetStats dataset_stats(const Dataset& d) {
  DatasetStats s;
  for (const Table& t : d.tables()) s += table_stats(t);
  return s;
}

namespace {

void drop_repeats(std::vector<Point>& pts) {
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// Applies the mechanical repairs; returns a description of what changed (empty if nothing).
std::string repair(WktShape& shape) {
  std::string notes;
  const auto note = [&](const std::string& s) {
    if (!notes.empty()) notes += "; ";
    notes += s;
  };
  if (shape.kind == GeometryKind::kLine) {
    const std::size_t before = shape.parts[0].size();
    drop_repeats(shape.parts[0]);
    if (shape.parts[0].size() != before) note("duplicate consecutive vertices dropped");
  } else if (shape.kind == GeometryKind::kRegion) {
    for (auto& ring : shape.parts) {
      const std::size_t before = ring.size();
      drop_repeats(ring);
      if (ring.size() != before) note("duplicate consecutive vertices dropped");
      if (ring.size() >= 2 && ring.front() != ring.back()) {
        ring.push_back(ring.front());
        note("unclosed ring closed");
      }
    }
  }
  return notes;
}

std::optional<EntityId> parse_id(const std::string& s) {
  EntityId v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw DatasetError("dataset manifest not found: " + path.string());
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw DatasetError("invalid manifest " + path.string() + ": " + e.what());
  }
}

Table load_table(const fs::path& dir, const json& spec, std::set<EntityId>& ids, LoadReport& report) {
  Table t;
  std::string file;
  try {
    t.name = spec.at("name").get<std::string>();
    file = spec.at("file").get<std::string>();
    t.kind = parse_geometry_kind(spec.at("kind").get<std::string>());
    t.label = spec.value("label", t.name);
  } catch (const std::exception& e) {
    throw DatasetError(std::string("invalid manifest table entry: ") + e.what());
  }

  const fs::path path = dir / file;
  if (!fs::exists(path)) throw DatasetError("table file not found: " + path.string());
  std::vector<csv::Record> rows;
  try {
    rows = csv::parse(io::read_file(path));
  } catch (const csv::CsvError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
  if (rows.empty()) throw DatasetError(path.string() + ": missing header");

  const auto& header = rows[0].fields;
  if (header.size() < 3 || header[0] != "id" || header[1] != "name" || header[2] != "wkt") {
    throw DatasetError(path.string() + ": header must start with id,name,wkt");
  }
  std::vector<std::string> attrs;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i].rfind("attr:", 0) != 0) {
      throw DatasetError(path.string() + ": unexpected column '" + header[i] + "'");
    }
    attrs.push_back(header[i].substr(5));
  }

  const auto reject = [&](std::size_t line, const std::string& msg) {
    report.rejects.push_back({t.name, file, line, msg});
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (f.size() != header.size()) {
      reject(line, "expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(f.size()));
      continue;
    }
    const auto id = parse_id(f[0]);
    if (!id) {
      reject(line, "invalid id '" + f[0] + "'");
      continue;
    }
    if (f[1].empty()) {
      reject(line, "empty name");
      continue;
    }
    WktShape shape;
    try {
      shape = parse_wkt(f[2]);
    } catch (const WktError& e) {
      reject(line, std::string("line ") + std::to_string(line) + ": " + e.what());
      continue;
    }
    if (shape.kind != t.kind) {
      reject(line, "geometry kind " + std::string(to_string(shape.kind)) + " in " +
                       std::string(to_string(t.kind)) + " table");
      continue;
    }
    const std::string repaired = repair(shape);
    std::optional<Geometry> geom;
    try {
      geom = to_geometry(shape);
    } catch (const GeometryError& e) {
      reject(line, std::string("invalid geometry: ") + e.what());
      continue;
    }
    if (!ids.insert(*id).second) {
      reject(line, "duplicate id " + f[0]);
      continue;
    }
    if (!repaired.empty()) report.warnings.push_back({t.name, file, line, repaired});

    Entity e;
    e.id = *id;
    e.name = f[1];
    e.table = t.name;
    e.geometry = std::move(*geom);
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      if (!f[3 + a].empty()) e.attributes.emplace(attrs[a], f[3 + a]);
    }
    t.entities.push_back(std::move(e));
  }
  return t;
}

}  // namespace

Dataset load_dataset(const fs::path& dir, LoadReport* report) {
  const json manifest = read_manifest(dir);
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  std::vector<Table> tables;
  std::set<EntityId> ids;
  std::string name;
  std::string crs;
  try {
    name = manifest.at("name").get<std::string>();
    crs = manifest.value("crs_note", "");
    for (const json& spec : manifest.at("tables")) tables.push_back(load_table(dir, spec, ids, rep));
  } catch (const json::exception& e) {
    throw DatasetError(std::string("invalid manifest: ") + e.what());
  }
  if (ids.empty()) throw DatasetError("dataset contains no entities");
  return Dataset(std::move(name), std::move(crs), std::move(tables));
}

void save_dataset(const Dataset& d, const fs::path& dir) {
  const fs::path staged = io::staging_path(dir);
  fs::create_directories(staged);
  try {
    json manifest;
    manifest["name"] = d.name();
    manifest["crs_note"] = d.crs_note();
    manifest["tables"] = json::array();
    for (const Table& t : d.tables()) {
      const std::string file = t.name + ".csv";
      manifest["tables"].push_back(
          {{"name", t.name}, {"file", file}, {"kind", to_string(t.kind)}, {"label", t.label}});

      std::set<std::string> attr_keys;
      for (const Entity& e : t.entities)
        for (const auto& [k, _] : e.attributes) attr_keys.insert(k);

      std::vector<std::string> header{"id", "name", "wkt"};
      for (const auto& k : attr_keys) header.push_back("attr:" + k);
      std::string out = csv::join(header);
      const std::vector<bool> quote{false, false, true};
      for (const Entity& e : t.entities) {
        std::vector<std::string> row{std::to_string(e.id), e.name, to_wkt(e.geometry)};
        for (const auto& k : attr_keys) {
          auto it = e.attributes.find(k);
          row.push_back(it == e.attributes.end() ? "" : it->second);
        }
        out += csv::join(row, quote);
      }
      io::write_file_atomic(staged / file, out);
    }
    io::write_file_atomic(staged / "manifest.json", manifest.dump(2) + "\n");
    io::replace_directory(staged, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staged, ec);
    throw;
  }
}

}  // namespace sscc
