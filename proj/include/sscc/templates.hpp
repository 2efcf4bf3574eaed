#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sscc/dataset.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/relations.hpp"

namespace sscc {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SlotKind { kEntity, kTable, kDistance, kOperator, kCount };

/// Which part of the matched knowledge-base row a slot is filled from.
enum class SlotRole {
  kNone,
  kSubject,    // subject table of an entity fact
  kObject,     // reference object of an entity fact
  kRelation1,  // first table of a relation-relation record
  kRelation2,
  kWitness,    // region entity witnessing an aggregation record
};

std::string_view to_string(SlotKind k);
std::string_view to_string(SlotRole r);

struct SlotSpec {
  std::string name;
  SlotKind kind = SlotKind::kEntity;
  /// nullopt means "any".
  std::optional<GeometryKind> geometry_constraint;
  std::string unit;
  SlotRole role = SlotRole::kNone;
  /// Entity slots only: render the executable side as a POINT literal.
  bool render_point = false;
  /// Table slots only: name the table by its plural noun in natural language.
  bool plural = true;

  friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

struct Template {
  std::string id;
  QueryType query_type = QueryType::kRange;
  std::string nl;
  std::string exe;
  std::vector<SlotSpec> slots;
  std::string distance_unit = "m";

  const SlotSpec* slot(std::string_view name) const;
  friend bool operator==(const Template&, const Template&) = default;
};

struct TemplateLibrary {
  std::vector<Template> templates;
  std::vector<std::string> warnings;

  std::size_t count(QueryType qt) const;
};

/// Slot names referenced by `{name}` placeholders, in order of appearance.
std::vector<std::string> placeholders(std::string_view pattern);

/// Parses and validates a JSON template array. `source` names the input in errors.
TemplateLibrary parse_templates(std::string_view json_text, std::string_view source = "<memory>");
TemplateLibrary load_templates(const std::filesystem::path& path);
/// The shipped library: three templates per query type.
const TemplateLibrary& default_templates();
std::string_view default_templates_json();

/// One value bound to a slot.
struct BoundValue {
  SlotKind kind = SlotKind::kEntity;
  EntityId entity = 0;
  std::string table;
  double distance = 0;  // meters
  Operator op = Operator::kIntersects;
  /// Operator slots: kind of the reference object the operator was dispatched on.
  GeometryKind object_kind = GeometryKind::kPoint;
  std::uint64_t count = 0;

  friend bool operator==(const BoundValue&, const BoundValue&) = default;
};

struct Binding {
  std::map<std::string, BoundValue> values;
  /// Knowledge-base row keys the binding was drawn from.
  std::vector<std::string> provenance;
  /// Entities the pair mentions or was derived from.
  std::vector<EntityId> entities;
  /// Geometry kind combination, e.g. "point/region".
  std::string combo;

  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Every distinct binding of `t` supported by a knowledge-base row, deterministic order.
/// The dataset supplies entity names and table membership.
std::vector<Binding> match_candidates(const Template& t, const KnowledgeBase& kb, const Dataset& d);

struct QueryPair {
  std::string nl;
  std::string exe;
  std::string template_id;
  QueryType query_type = QueryType::kRange;
  std::map<std::string, BoundValue> binding;
  /// Row keys joined by ';', e.g. "er:12:40:inside".
  std::string provenance;
  std::vector<EntityId> entities;
  std::string combo;

  friend bool operator==(const QueryPair&, const QueryPair&) = default;
};

/// Substitutes the binding into both patterns. Throws TemplateError when a slot is unbound.
QueryPair instantiate(const Template& t, const Binding& b, const Dataset& d);

/// "2.0 km" at or above 1000 m for km templates, otherwise integer meters.
std::string render_distance_nl(double meters, std::string_view unit);
/// Integer meters, rounded up.
std::string render_distance_exe(double meters);

/// True when `text` has a `{name}` placeholder left.
bool has_placeholder(std::string_view text);

/// Throws TemplateError unless every provenance key names a row of `kb`.
void check_provenance(const QueryPair& p, const KnowledgeBase& kb);

}  // namespace sscc
