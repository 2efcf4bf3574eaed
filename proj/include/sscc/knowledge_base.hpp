#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sscc/config.hpp"
#include "sscc/dataset.hpp"
#include "sscc/relations.hpp"

namespace sscc {

class KbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kKbSchemaVersion = 1;

struct BuildMeta {
  std::string timestamp;
  ExtractionConfig extraction;
  QualityConfig quality;
  nlohmann::json counts = nlohmann::json::object();
};

/// Quality-filtered entity-relation and relation-relation tables.
struct KnowledgeBase {
  std::vector<EntityRelation> entity_relations;
  std::vector<RelationRelation> relation_relations;
  std::string source_dataset;
  BuildMeta meta;
};

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

/// Rounds distances to millimetres and scores to 6 decimals (the persisted precision)
/// and sorts both tables by key.
void normalize(KnowledgeBase& kb);

/// Writes entity_relations.csv, relation_relations.csv and kb_meta.json, replacing
/// `dir` as a whole. Returns the written file paths.
std::vector<std::filesystem::path> save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir);

/// Reads a directory written by save_kb and validates the stored invariants.
KnowledgeBase load_kb(const std::filesystem::path& dir);

/// Throws KbError when a relation names an entity or table that is not in `d`.
void check_kb_against_dataset(const KnowledgeBase& kb, const Dataset& d);

/// Conjunctive constraint set; unset fields do not constrain.
struct RelationQuery {
  std::optional<Operator> op;
  std::optional<QueryType> query_type;
  std::optional<GeometryKind> subject_kind;
  std::optional<GeometryKind> object_kind;
  std::optional<GeometryKind> relation1_type;
  std::optional<GeometryKind> relation2_type;
  std::optional<double> max_distance;
  std::optional<double> min_score;
};

/// Entity relations meeting every constraint, by score descending then key.
/// Constraints that only apply to relation-relation records match nothing here.
std::vector<EntityRelation> select_entity_relations(const KnowledgeBase& kb, const RelationQuery& q);

/// Relation-relation records meeting every constraint, by score descending then key.
std::vector<RelationRelation> select_relation_relations(const KnowledgeBase& kb,
                                                        const RelationQuery& q);

}  // namespace sscc
