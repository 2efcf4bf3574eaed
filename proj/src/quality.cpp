#include "sscc/quality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>

namespace sscc {

namespace {

struct CompatRule {
  Operator op;
  std::optional<GeometryKind> subject;  // nullopt matches any kind
  std::optional<GeometryKind> object;
  bool allowed;
};

// First matching rule wins.
constexpr std::array<CompatRule, 4> kCompatibility{{
    {Operator::kIntersects, GeometryKind::kPoint, GeometryKind::kPoint, false},
    {Operator::kIntersects, std::nullopt, std::nullopt, true},
    {Operator::kInside, std::nullopt, GeometryKind::kRegion, true},
    {Operator::kDistanceScan, std::nullopt, std::nullopt, true},
}};

}  // namespace

bool operator_compatible(Operator op, GeometryKind subject, GeometryKind object) {
  for (const CompatRule& rule : kCompatibility) {
    if (rule.op != op) continue;
    if (rule.subject && *rule.subject != subject) continue;
    if (rule.object && *rule.object != object) continue;
    return rule.allowed;
  }
  return false;
}

double score_entity_relation(const EntityRelation& r, const Dataset& d, const QualityConfig& cfg) {
  const Entity* s = d.find_entity(r.subject);
  const Entity* o = d.find_entity(r.object);
  if (!s || !o) throw QualityError("dangling relation");
  const Geometry& a = s->geometry;
  const Geometry& b = o->geometry;

  double overlap = 0;
  if (a.is_region() && b.is_region()) {
    overlap = overlap_ratio(a, b);
  } else if (intersects(a, b)) {
    overlap = 1;
  }
  const double type = operator_compatible(r.op, a.kind(), b.kind()) ? 1 : 0;
  const double decay = std::exp(-r.distance / cfg.lambda_m);
  return std::clamp(cfg.w_distance * decay + cfg.w_overlap * overlap + cfg.w_type * type, 0.0, 1.0);
}

double score_relation_relation(const RelationRelation& rr, std::span<const Witness> members,
                               const QualityConfig& cfg) {
  if (members.empty()) throw QualityError("unsupported relation");
  const double n = static_cast<double>(members.size());
  double total = 0;
  std::size_t touching = 0;
  std::vector<double> ds;
  ds.reserve(members.size());
  for (const Witness& w : members) {
    total += w.score;
    if (w.distance <= kTolerance) ++touching;
    ds.push_back(w.distance);
  }
  const double mean = total / n;
  const double zero_share = static_cast<double>(touching) / n;
  const double intersect = rr.query_type == QueryType::kDistanceJoin ? 1 - zero_share : zero_share;

  std::sort(ds.begin(), ds.end());
  const std::size_t m = ds.size() / 2;
  const double median = ds.size() % 2 ? ds[m] : (ds[m - 1] + ds[m]) / 2;
  const double rationality = std::exp(-std::abs(median - rr.distance) / cfg.lambda_m);

  return std::clamp(cfg.multi_w_avg * mean + cfg.multi_w_intersect * intersect +
                        cfg.multi_w_distance * rationality,
                    0.0, 1.0);
}

}  // namespace sscc
