#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sscc/config.hpp"
#include "sscc/dataset.hpp"
#include "sscc/relations.hpp"

namespace sscc {

class QualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whether an operator is meaningful for the subject/object geometry kinds.
bool operator_compatible(Operator op, GeometryKind subject, GeometryKind object);

/// w_distance * exp(-d / lambda) + w_overlap * O + w_type * T.
/// Throws QualityError("dangling relation") when an endpoint is missing from the dataset.
double score_entity_relation(const EntityRelation& r, const Dataset& d, const QualityConfig& cfg);

/// multi_w_avg * mean(member scores) + multi_w_intersect * I + multi_w_distance * D.
/// Throws QualityError("unsupported relation") for an empty member list.
double score_relation_relation(const RelationRelation& rr, std::span<const Witness> members,
                               const QualityConfig& cfg);

struct FilterReport {
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejected_by_operator;
};

/// Keeps relations scoring strictly above the threshold, preserving order.
template <typename Relation>
std::vector<Relation> filter_by_threshold(const std::vector<Relation>& relations,
                                          const QualityConfig& cfg, FilterReport* report = nullptr) {
  std::vector<Relation> kept;
  FilterReport local;
  for (const Relation& r : relations) {
    if (r.score > cfg.threshold) {
      kept.push_back(r);
      ++local.kept;
    } else {
      ++local.rejected;
      ++local.rejected_by_operator[std::string(to_string(r.op))];
    }
  }
  if (report) *report = std::move(local);
  return kept;
}

}  // namespace sscc
