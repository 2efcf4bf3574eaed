#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sscc/geometry.hpp"

namespace sscc {

using EntityId = std::int64_t;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entity {
  EntityId id = 0;
  std::string name;
  std::string table;
  Geometry geometry = Geometry::point(0, 0);
  std::map<std::string, std::string> attributes;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Table {
  std::string name;
  GeometryKind kind = GeometryKind::kPoint;
  /// Singular noun used when the table is named in natural language ("cinema").
  std::string label;
  std::vector<Entity> entities;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Named collection of tables. Immutable once constructed; the constructor
/// enforces unique table names, unique entity ids, non-empty entity names and
/// per-table geometry kind.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::string crs_note, std::vector<Table> tables);

  const std::string& name() const { return name_; }
  const std::string& crs_note() const { return crs_note_; }
  const std::vector<Table>& tables() const { return tables_; }
  const Table* find_table(std::string_view name) const;

  std::size_t entity_count() const { return by_id_.size(); }
  const Entity* find_entity(EntityId id) const;
  /// Throws DatasetError for an unknown id.
  const Entity& entity(EntityId id) const;
  /// All entities carrying this name, ascending by id.
  std::vector<const Entity*> entities_named(std::string_view name) const;
  /// Kind of the table an entity belongs to.
  const Table& table_of(EntityId id) const;

  template <typename F>
  void for_each_entity(F&& f) const {
    for (const Table& t : tables_)
      for (const Entity& e : t.entities) f(e);
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.name_ == b.name_ && a.crs_note_ == b.crs_note_ && a.tables_ == b.tables_;
  }

 private:
  std::string name_;
  std::string crs_note_;
  std::vector<Table> tables_;
  std::unordered_map<EntityId, std::pair<std::size_t, std::size_t>> by_id_;
  std::unordered_map<std::string, std::vector<EntityId>> by_name_;
};

struct DatasetStats {
  std::size_t n_tables = 0;
  std::size_t n_points = 0;
  std::size_t n_lines = 0;
  std::size_t n_regions = 0;
  std::size_t n_entities = 0;

  DatasetStats& operator+=(const DatasetStats& o);
  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const Dataset& d);
DatasetStats table_stats(const Table& t);

struct RowDiagnostic {
  std::string table;
  std::string file;
  std::size_t line = 0;
  std::string message;
};

struct LoadReport {
  std::vector<RowDiagnostic> warnings;  // repaired rows
  std::vector<RowDiagnostic> rejects;   // dropped rows
};

/// Loads a dataset directory (manifest.json plus one CSV per table). Rows that
/// cannot be repaired are rejected and listed in the report; the dataset still loads.
Dataset load_dataset(const std::filesystem::path& dir, LoadReport* report = nullptr);

/// Writes manifest.json and one `<table>.csv` per table, replacing `dir` atomically.
void save_dataset(const Dataset& d, const std::filesystem::path& dir);

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  std::size_t n_lines = 0;
  std::size_t n_regions = 0;
  BoundingBox extent{0, 0, 20'000, 20'000};
  /// 0 picks one table per non-empty geometry kind.
  std::size_t n_tables = 0;
};

/// Deterministic synthetic dataset: random points, 2-8 vertex polylines and
/// convex 5-10 vertex regions inside the extent, spread over themed tables.
Dataset synthesize_dataset(const SynthSpec& spec);

/// Cardinalities of the two evaluation datasets (Berlin- and Nanjing-shaped).
SynthSpec berlin_profile(std::uint64_t seed = 1);
SynthSpec nanjing_profile(std::uint64_t seed = 1);

}  // namespace sscc
