#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sscc/config.hpp"
#include "sscc/dataset.hpp"
#include "sscc/str_tree.hpp"

namespace sscc {

enum class Operator { kIntersects, kInside, kDistanceScan, kSymmJoin };
enum class QueryType { kRange, kKnn, kSpatialJoin, kDistanceJoin, kAggregation };

std::string_view to_string(Operator op);
std::string_view to_string(QueryType qt);
/// Both throw std::invalid_argument on unknown names.
Operator parse_operator(std::string_view text);
QueryType parse_query_type(std::string_view text);

inline constexpr QueryType kAllQueryTypes[] = {QueryType::kRange, QueryType::kKnn,
                                               QueryType::kSpatialJoin, QueryType::kDistanceJoin,
                                               QueryType::kAggregation};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fact between one subject entity and one reference object.
struct EntityRelation {
  EntityId subject = 0;
  EntityId object = 0;
  Operator op = Operator::kIntersects;
  double distance = 0;
  GeometryKind subject_kind = GeometryKind::kPoint;
  GeometryKind object_kind = GeometryKind::kPoint;
  double score = 0;

  auto key() const { return std::tuple(subject, object, op); }
  friend bool operator==(const EntityRelation&, const EntityRelation&) = default;
};

/// Entity pair backing a relation-relation record.
struct Witness {
  EntityId first = 0;
  EntityId second = 0;
  double distance = 0;
  double score = 0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

/// An aggregate fact between two tables, supported by witnessing entity pairs.
struct RelationRelation {
  QueryType query_type = QueryType::kSpatialJoin;
  std::string relation1;
  std::string relation2;
  GeometryKind relation1_type = GeometryKind::kPoint;
  GeometryKind relation2_type = GeometryKind::kPoint;
  double distance = 0;
  Operator op = Operator::kSymmJoin;
  std::size_t support = 0;
  double score = 0;
  /// In-memory only; not persisted with the knowledge base.
  std::vector<Witness> witnesses;

  auto key() const { return std::tie(query_type, relation1, relation2); }
  friend bool operator==(const RelationRelation& a, const RelationRelation& b) {
    return std::tie(a.query_type, a.relation1, a.relation2, a.relation1_type, a.relation2_type,
                    a.distance, a.op, a.support, a.score) ==
           std::tie(b.query_type, b.relation1, b.relation2, b.relation1_type, b.relation2_type,
                    b.distance, b.op, b.support, b.score);
  }
};

/// Index over every entity of a dataset, keyed by entity id.
StrTree build_dataset_index(const Dataset& d, std::size_t node_capacity = StrTree::kDefaultNodeCapacity);

/// Entity-reference facts: intersects, inside (region objects) and distancescan
/// (k nearest per reference table within the radius). Sorted by (subject, object, operator).
/// Throws ExtractionError("stale index") when `tree` does not index exactly `d`.
std::vector<EntityRelation> extract_entity_relations(const Dataset& d, const StrTree& tree,
                                                     const ExtractionConfig& cfg);

/// Table-level joins and aggregations grouped from entity facts.
std::vector<RelationRelation> extract_relation_relations(const Dataset& d,
                                                         const std::vector<EntityRelation>& facts,
                                                         const ExtractionConfig& cfg);

/// Nearest-rank 90th percentile, rounded up to the next grid multiple strictly above it.
double join_radius(std::vector<double> distances, double grid);

}  // namespace sscc
