#include "sscc/relations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "parallel.hpp"

namespace sscc {

std::string_view to_string(Operator op) {
  switch (op) {
    case Operator::kIntersects:
      return "intersects";
    case Operator::kInside:
      return "inside";
    case Operator::kDistanceScan:
      return "distancescan";
    case Operator::kSymmJoin:
      return "symmjoin";
  }
  return "?";
}

std::string_view to_string(QueryType qt) {
  switch (qt) {
    case QueryType::kRange:
      return "range";
    case QueryType::kKnn:
      return "knn";
    case QueryType::kSpatialJoin:
      return "spatial_join";
    case QueryType::kDistanceJoin:
      return "distance_join";
    case QueryType::kAggregation:
      return "aggregation";
  }
  return "?";
}

Operator parse_operator(std::string_view text) {
  for (Operator op : {Operator::kIntersects, Operator::kInside, Operator::kDistanceScan,
                      Operator::kSymmJoin}) {
    if (to_string(op) == text) return op;
  }
  throw std::invalid_argument("unknown operator '" + std::string(text) + "'");
}

QueryType parse_query_type(std::string_view text) {
  for (QueryType qt : kAllQueryTypes) {
    if (to_string(qt) == text) return qt;
  }
  throw std::invalid_argument("unknown query type '" + std::string(text) + "'");
}

StrTree build_dataset_index(const Dataset& d, std::size_t node_capacity) {
  std::vector<IndexEntry> entries;
  entries.reserve(d.entity_count());
  d.for_each_entity([&](const Entity& e) { entries.push_back({e.id, e.geometry.bbox()}); });
  return StrTree::build(std::move(entries), node_capacity);
}

namespace {

void check_index(const Dataset& d, const StrTree& tree) {
  if (tree.size() != d.entity_count()) throw ExtractionError("stale index");
  std::set<ItemId> seen;
  for (const IndexEntry& e : tree.entries()) {
    const Entity* ent = d.find_entity(e.item_id);
    if (!ent || !(ent->geometry.bbox() == e.bbox) || !seen.insert(e.item_id).second) {
      throw ExtractionError("stale index");
    }
  }
}

}  // namespace

std::vector<EntityRelation> extract_entity_relations(const Dataset& d, const StrTree& tree,
                                                     const ExtractionConfig& cfg) {
  cfg.validate();
  check_index(d, tree);

  std::vector<const Table*> references;
  for (const Table& t : d.tables()) {
    const bool wanted = cfg.reference_tables.empty() ||
                        std::find(cfg.reference_tables.begin(), cfg.reference_tables.end(),
                                  t.name) != cfg.reference_tables.end();
    if (wanted) references.push_back(&t);
  }
  std::set<std::string_view> reference_names;
  for (const Table* t : references) reference_names.insert(t->name);

  std::vector<StrTree> per_table;
  for (const Table* t : references) {
    std::vector<IndexEntry> entries;
    for (const Entity& e : t->entities) entries.push_back({e.id, e.geometry.bbox()});
    per_table.push_back(StrTree::build(std::move(entries), cfg.node_capacity));
  }

  std::vector<const Entity*> subjects;
  d.for_each_entity([&](const Entity& e) { subjects.push_back(&e); });

  const auto lookup = [&](ItemId id) -> const Geometry& { return d.entity(id).geometry; };

  std::vector<std::vector<EntityRelation>> partial(std::max<std::size_t>(1, cfg.jobs));
  detail::parallel_chunks(subjects.size(), cfg.jobs, [&](std::size_t begin, std::size_t end,
                                                         std::size_t chunk) {
    auto& out = partial[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const Entity& s = *subjects[i];
      const GeometryKind sk = s.geometry.kind();
      tree.visit_bbox(s.geometry.bbox().expanded(kTolerance), [&](ItemId cid) {
        if (cid == s.id) return;
        const Entity& c = d.entity(cid);
        if (!reference_names.contains(c.table)) return;
        if (!intersects(s.geometry, c.geometry)) return;
        const GeometryKind ck = c.geometry.kind();
        out.push_back({s.id, c.id, Operator::kIntersects, 0.0, sk, ck, 0.0});
        if (ck == GeometryKind::kRegion && inside(s.geometry, c.geometry)) {
          out.push_back({s.id, c.id, Operator::kInside, 0.0, sk, ck, 0.0});
        }
      });
      for (std::size_t r = 0; r < references.size(); ++r) {
        const auto hits = per_table[r].nearest_k(s.geometry, cfg.k, lookup, cfg.radius_m,
                                                 [&](ItemId id) { return id == s.id; });
        for (const Neighbor& n : hits) {
          out.push_back({s.id, n.item_id, Operator::kDistanceScan, n.distance, sk,
                         references[r]->kind, 0.0});
        }
      }
    }
  });

  std::vector<EntityRelation> facts;
  for (auto& p : partial) facts.insert(facts.end(), p.begin(), p.end());
  std::sort(facts.begin(), facts.end(),
            [](const EntityRelation& a, const EntityRelation& b) { return a.key() < b.key(); });
  return facts;
}

double join_radius(std::vector<double> distances, double grid) {
  if (distances.empty() || !(grid > 0)) throw std::invalid_argument("join_radius needs witnesses and a positive grid");
  std::sort(distances.begin(), distances.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(distances.size())));
  const double p90 = distances[std::max<std::size_t>(rank, 1) - 1];
  return (std::floor(p90 / grid) + 1) * grid;
}

std::vector<RelationRelation> extract_relation_relations(const Dataset& d,
                                                         const std::vector<EntityRelation>& facts,
                                                         const ExtractionConfig& cfg) {
  using TablePair = std::pair<std::string, std::string>;
  using EntityPair = std::pair<EntityId, EntityId>;
  std::map<TablePair, std::map<EntityPair, Witness>> joins;
  std::map<TablePair, std::map<EntityPair, Witness>> distance_joins;
  std::map<TablePair, std::map<EntityPair, Witness>> aggregations;

  // Symmetric groups use the table pair in name order and the entity pair in table order.
  const auto add_symmetric = [&](auto& groups, const EntityRelation& f) {
    std::string ta = d.table_of(f.subject).name;
    std::string tb = d.table_of(f.object).name;
    EntityId ea = f.subject;
    EntityId eb = f.object;
    if (tb < ta || (ta == tb && eb < ea)) {
      std::swap(ta, tb);
      std::swap(ea, eb);
    }
    auto& group = groups[{ta, tb}];
    auto [it, fresh] = group.try_emplace({ea, eb}, Witness{ea, eb, f.distance, f.score});
    if (!fresh) it->second.score = std::max(it->second.score, f.score);
  };

  for (const EntityRelation& f : facts) {
    switch (f.op) {
      case Operator::kIntersects:
        add_symmetric(joins, f);
        break;
      case Operator::kDistanceScan:
        add_symmetric(distance_joins, f);
        break;
      case Operator::kInside: {
        const Table& obj = d.table_of(f.object);
        if (obj.kind != GeometryKind::kRegion) break;
        aggregations[{d.table_of(f.subject).name, obj.name}].try_emplace(
            {f.subject, f.object}, Witness{f.subject, f.object, f.distance, f.score});
        break;
      }
      case Operator::kSymmJoin:
        break;
    }
  }

  std::vector<RelationRelation> out;
  const auto emit = [&](QueryType qt, Operator op, const auto& groups) {
    for (const auto& [tables, pairs] : groups) {
      if (pairs.size() < cfg.min_support) continue;
      RelationRelation rr;
      rr.query_type = qt;
      rr.relation1 = tables.first;
      rr.relation2 = tables.second;
      rr.relation1_type = d.find_table(tables.first)->kind;
      rr.relation2_type = d.find_table(tables.second)->kind;
      rr.op = op;
      rr.support = pairs.size();
      for (const auto& [_, w] : pairs) rr.witnesses.push_back(w);
      if (qt == QueryType::kDistanceJoin) {
        std::vector<double> ds;
        for (const Witness& w : rr.witnesses) ds.push_back(w.distance);
        rr.distance = join_radius(std::move(ds), cfg.distance_grid_m);
      }
      out.push_back(std::move(rr));
    }
  };
  emit(QueryType::kSpatialJoin, Operator::kSymmJoin, joins);
  emit(QueryType::kDistanceJoin, Operator::kDistanceScan, distance_joins);
  emit(QueryType::kAggregation, Operator::kSymmJoin, aggregations);

  std::sort(out.begin(), out.end(),
            [](const RelationRelation& a, const RelationRelation& b) { return a.key() < b.key(); });
  return out;
}

}  // namespace sscc
