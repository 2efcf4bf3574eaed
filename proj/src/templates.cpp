#include "sscc/templates.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "sscc/io.hpp"
#include "sscc/query.hpp"

namespace sscc {

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::kEntity:
      return "entity";
    case SlotKind::kTable:
      return "table";
    case SlotKind::kDistance:
      return "distance";
    case SlotKind::kOperator:
      return "operator";
    case SlotKind::kCount:
      return "count";
  }
  return "?";
}

std::string_view to_string(SlotRole r) {
  switch (r) {
    case SlotRole::kNone:
      return "none";
    case SlotRole::kSubject:
      return "subject";
    case SlotRole::kObject:
      return "object";
    case SlotRole::kRelation1:
      return "relation1";
    case SlotRole::kRelation2:
      return "relation2";
    case SlotRole::kWitness:
      return "witness_object";
  }
  return "?";
}

const SlotSpec* Template::slot(std::string_view name) const {
  for (const SlotSpec& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::size_t TemplateLibrary::count(QueryType qt) const {
  return static_cast<std::size_t>(std::count_if(
      templates.begin(), templates.end(), [&](const Template& t) { return t.query_type == qt; }));
}

namespace {

bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

/// Calls fn(begin, end, name) for each `{name}` in the pattern.
template <typename F>
void scan_placeholders(std::string_view pattern, F&& fn) {
  std::size_t i = 0;
  while ((i = pattern.find('{', i)) != std::string_view::npos) {
    std::size_t j = i + 1;
    while (j < pattern.size() && is_name_char(pattern[j])) ++j;
    if (j > i + 1 && j < pattern.size() && pattern[j] == '}') {
      fn(i, j + 1, pattern.substr(i + 1, j - i - 1));
      i = j + 1;
    } else {
      ++i;
    }
  }
}

template <typename F>
std::string substitute(std::string_view pattern, F&& value_of) {
  std::string out;
  std::size_t last = 0;
  scan_placeholders(pattern, [&](std::size_t b, std::size_t e, std::string_view name) {
    out.append(pattern.substr(last, b - last));
    out += value_of(name);
    last = e;
  });
  out.append(pattern.substr(last));
  return out;
}

SlotKind parse_slot_kind(const std::string& s) {
  for (SlotKind k : {SlotKind::kEntity, SlotKind::kTable, SlotKind::kDistance, SlotKind::kOperator,
                     SlotKind::kCount}) {
    if (to_string(k) == s) return k;
  }
  throw TemplateError("unknown slot kind '" + s + "'");
}

SlotRole parse_slot_role(const std::string& s) {
  for (SlotRole r : {SlotRole::kNone, SlotRole::kSubject, SlotRole::kObject, SlotRole::kRelation1,
                     SlotRole::kRelation2, SlotRole::kWitness}) {
    if (to_string(r) == s) return r;
  }
  throw TemplateError("unknown slot role '" + s + "'");
}

std::string canary(const SlotSpec& s) {
  switch (s.kind) {
    case SlotKind::kTable:
      return "T";
    case SlotKind::kEntity:
      return s.render_point ? query::print_point({1, 2}) : query::quote_string("E");
    case SlotKind::kDistance:
      return "100";
    case SlotKind::kOperator:
      return "inside";
    case SlotKind::kCount:
      return "3";
  }
  return "";
}

bool has_slot(const Template& t, SlotKind kind, SlotRole role) {
  return std::any_of(t.slots.begin(), t.slots.end(),
                     [&](const SlotSpec& s) { return s.kind == kind && s.role == role; });
}

bool has_kind(const Template& t, SlotKind kind) {
  return std::any_of(t.slots.begin(), t.slots.end(), [&](const SlotSpec& s) { return s.kind == kind; });
}

void check_mandatory(const Template& t) {
  const auto need = [&](bool ok, const char* what) {
    if (!ok) {
      throw TemplateError(fmt::format("template '{}': {} template needs {}", t.id,
                                      to_string(t.query_type), what));
    }
  };
  switch (t.query_type) {
    case QueryType::kRange:
      need(has_slot(t, SlotKind::kTable, SlotRole::kSubject), "a subject table slot");
      need(has_slot(t, SlotKind::kEntity, SlotRole::kObject), "a reference entity slot");
      need(has_kind(t, SlotKind::kDistance) || has_kind(t, SlotKind::kOperator),
           "a distance or operator slot");
      break;
    case QueryType::kKnn: {
      need(has_slot(t, SlotKind::kTable, SlotRole::kSubject), "a subject table slot");
      need(has_kind(t, SlotKind::kCount), "a count slot");
      const auto it = std::find_if(t.slots.begin(), t.slots.end(), [](const SlotSpec& s) {
        return s.kind == SlotKind::kEntity && s.role == SlotRole::kObject;
      });
      need(it != t.slots.end() && it->render_point &&
               it->geometry_constraint == GeometryKind::kPoint,
           "a point anchor slot rendered as a point");
      break;
    }
    case QueryType::kSpatialJoin:
    case QueryType::kDistanceJoin:
      need(has_slot(t, SlotKind::kTable, SlotRole::kRelation1) &&
               has_slot(t, SlotKind::kTable, SlotRole::kRelation2),
           "two relation table slots");
      if (t.query_type == QueryType::kDistanceJoin) need(has_kind(t, SlotKind::kDistance), "a distance slot");
      break;
    case QueryType::kAggregation:
      need(has_slot(t, SlotKind::kTable, SlotRole::kRelation1), "a relation1 table slot");
      need(has_slot(t, SlotKind::kEntity, SlotRole::kWitness) ||
               has_slot(t, SlotKind::kTable, SlotRole::kRelation2),
           "a region entity or relation2 table slot");
      break;
  }
}

Template parse_template(const nlohmann::json& j, std::string_view source, std::size_t index) {
  Template t;
  const auto where = [&] {
    return t.id.empty() ? fmt::format("{}: template #{}", source, index) : fmt::format("template '{}'", t.id);
  };
  try {
    t.id = j.at("id").get<std::string>();
    if (t.id.empty()) throw TemplateError(where() + ": empty id");
    const std::string qt = j.at("query_type").get<std::string>();
    try {
      t.query_type = parse_query_type(qt);
    } catch (const std::invalid_argument&) {
      throw TemplateError(where() + ": unknown query_type '" + qt + "'");
    }
    t.nl = j.at("nl").get<std::string>();
    t.exe = j.at("exe").get<std::string>();
    t.distance_unit = j.value("distance_unit", std::string("m"));
    if (t.distance_unit != "m" && t.distance_unit != "km") {
      throw TemplateError(where() + ": distance_unit must be m or km");
    }
    for (const auto& sj : j.at("slots")) {
      SlotSpec s;
      s.name = sj.at("name").get<std::string>();
      s.kind = parse_slot_kind(sj.at("kind").get<std::string>());
      const std::string gc = sj.value("geometry_constraint", std::string("any"));
      if (gc != "any") s.geometry_constraint = parse_geometry_kind(gc);
      s.unit = sj.value("unit", std::string());
      s.role = parse_slot_role(sj.value("role", std::string("none")));
      const std::string render = sj.value("render", std::string());
      if (!render.empty() && render != "point") throw TemplateError("unknown render '" + render + "'");
      s.render_point = render == "point";
      s.plural = sj.value("plural", true);
      if (s.kind == SlotKind::kDistance && s.unit != "m" && s.unit != "km") {
        throw TemplateError("distance slot '" + s.name + "' needs unit m or km");
      }
      if ((s.kind == SlotKind::kEntity || s.kind == SlotKind::kTable) && s.role == SlotRole::kNone) {
        throw TemplateError("slot '" + s.name + "' needs a role");
      }
      if (t.slot(s.name)) throw TemplateError("duplicate slot '" + s.name + "'");
      t.slots.push_back(std::move(s));
    }
  } catch (const TemplateError& e) {
    const std::string msg = e.what();
    if (msg.rfind("template", 0) == 0 || msg.rfind(std::string(source), 0) == 0) throw;
    throw TemplateError(where() + ": " + msg);
  } catch (const std::exception& e) {
    throw TemplateError(where() + ": " + e.what());
  }

  const auto nl_names = placeholders(t.nl);
  const auto exe_names = placeholders(t.exe);
  const std::set<std::string> nl_set(nl_names.begin(), nl_names.end());
  const std::set<std::string> exe_set(exe_names.begin(), exe_names.end());
  if (nl_set != exe_set) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(nl_set.begin(), nl_set.end(), exe_set.begin(), exe_set.end(),
                                  std::back_inserter(diff));
    throw TemplateError(fmt::format("template '{}': nl and exe slot sets differ ({})", t.id,
                                    fmt::join(diff, ", ")));
  }
  std::set<std::string> specced;
  for (const SlotSpec& s : t.slots) specced.insert(s.name);
  if (specced != nl_set) {
    throw TemplateError(fmt::format("template '{}': slot specs do not match placeholders", t.id));
  }
  check_mandatory(t);

  const std::string probe = substitute(t.exe, [&](std::string_view name) { return canary(*t.slot(name)); });
  try {
    query::parse_query(probe);
  } catch (const query::QueryError& e) {
    throw TemplateError(fmt::format("template '{}': exe pattern does not parse: {}", t.id, e.what()));
  }
  return t;
}

std::string pluralize(const std::string& noun) {
  if (noun.empty()) return noun;
  const auto ends = [&](std::string_view s) {
    return noun.size() >= s.size() && noun.compare(noun.size() - s.size(), s.size(), s) == 0;
  };
  if (ends("s") || ends("x") || ends("ch") || ends("sh")) return noun + "es";
  if (ends("y") && noun.size() > 1 && std::string_view("aeiou").find(noun[noun.size() - 2]) == std::string_view::npos) {
    return noun.substr(0, noun.size() - 1) + "ies";
  }
  return noun + "s";
}

bool kind_ok(const SlotSpec* s, GeometryKind k) {
  return !s || !s->geometry_constraint || *s->geometry_constraint == k;
}

const SlotSpec* find_role(const Template& t, SlotKind kind, SlotRole role) {
  for (const SlotSpec& s : t.slots) {
    if (s.kind == kind && s.role == role) return &s;
  }
  return nullptr;
}

std::string er_key(const EntityRelation& r) {
  return fmt::format("er:{}:{}:{}", r.subject, r.object, to_string(r.op));
}

std::string rr_key(const RelationRelation& r) {
  return fmt::format("rr:{}:{}:{}", to_string(r.query_type), r.relation1, r.relation2);
}

std::string combo(GeometryKind a, GeometryKind b) {
  return fmt::format("{}/{}", to_string(a), to_string(b));
}

bool unique_name(const Dataset& d, const Entity& e) { return d.entities_named(e.name).size() == 1; }

BoundValue table_value(const std::string& name) {
  BoundValue v;
  v.kind = SlotKind::kTable;
  v.table = name;
  return v;
}

BoundValue entity_value(EntityId id) {
  BoundValue v;
  v.kind = SlotKind::kEntity;
  v.entity = id;
  return v;
}

BoundValue distance_value(double m) {
  BoundValue v;
  v.kind = SlotKind::kDistance;
  v.distance = m;
  return v;
}

/// Operator chosen by the kind of the reference object.
struct Dispatch {
  GeometryKind object;
  Operator op;
  const char* nl;
};
constexpr Dispatch kDispatch[] = {
    {GeometryKind::kRegion, Operator::kInside, "inside"},
    {GeometryKind::kLine, Operator::kIntersects, "on"},
    {GeometryKind::kPoint, Operator::kIntersects, "at"},
};

const Dispatch& dispatch(GeometryKind object) {
  for (const Dispatch& d : kDispatch) {
    if (d.object == object) return d;
  }
  throw TemplateError("no operator for object kind");
}

std::vector<Binding> match_range(const Template& t, const KnowledgeBase& kb, const Dataset& d) {
  const SlotSpec* subject = find_role(t, SlotKind::kTable, SlotRole::kSubject);
  const SlotSpec* object = find_role(t, SlotKind::kEntity, SlotRole::kObject);
  const SlotSpec* dist = nullptr;
  const SlotSpec* op = nullptr;
  for (const SlotSpec& s : t.slots) {
    if (s.kind == SlotKind::kDistance) dist = &s;
    if (s.kind == SlotKind::kOperator) op = &s;
  }
  std::vector<Binding> out;
  std::set<std::tuple<std::string, EntityId, double>> seen;
  for (const EntityRelation& r : kb.entity_relations) {
    if (!kind_ok(subject, r.subject_kind) || !kind_ok(object, r.object_kind)) continue;
    const Entity* s = d.find_entity(r.subject);
    const Entity* o = d.find_entity(r.object);
    if (!s || !o || !unique_name(d, *o)) continue;
    Binding b;
    if (dist) {
      if (r.op != Operator::kDistanceScan || !(r.distance > 0)) continue;
      const double limit = std::ceil(r.distance);
      if (!seen.insert({s->table, o->id, limit}).second) continue;
      b.values[dist->name] = distance_value(limit);
    } else {
      const bool contained = r.op == Operator::kInside && r.object_kind == GeometryKind::kRegion;
      const bool touching = r.op == Operator::kDistanceScan && r.distance == 0 &&
                            r.object_kind != GeometryKind::kRegion &&
                            intersects(s->geometry, o->geometry);
      if (!contained && !touching) continue;
      if (!seen.insert({s->table, o->id, 0.0}).second) continue;
      BoundValue v;
      v.kind = SlotKind::kOperator;
      v.op = dispatch(o->geometry.kind()).op;
      v.object_kind = o->geometry.kind();
      b.values[op->name] = v;
    }
    b.values[subject->name] = table_value(s->table);
    b.values[object->name] = entity_value(o->id);
    b.provenance.push_back(er_key(r));
    b.entities = {s->id, o->id};
    b.combo = combo(r.subject_kind, r.object_kind);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Binding> match_knn(const Template& t, const KnowledgeBase& kb, const Dataset& d) {
  const SlotSpec* subject = find_role(t, SlotKind::kTable, SlotRole::kSubject);
  const SlotSpec* anchor = find_role(t, SlotKind::kEntity, SlotRole::kObject);
  const SlotSpec* k = nullptr;
  for (const SlotSpec& s : t.slots) {
    if (s.kind == SlotKind::kCount) k = &s;
  }
  std::map<std::pair<std::string, EntityId>, std::vector<const EntityRelation*>> groups;
  for (const EntityRelation& r : kb.entity_relations) {
    if (r.op != Operator::kDistanceScan || r.object_kind != GeometryKind::kPoint) continue;
    if (!kind_ok(subject, r.subject_kind) || !kind_ok(anchor, r.object_kind)) continue;
    const Entity* s = d.find_entity(r.subject);
    const Entity* o = d.find_entity(r.object);
    if (!s || !o || s->table == o->table || !o->geometry.is_point()) continue;
    groups[{s->table, o->id}].push_back(&r);
  }
  std::vector<Binding> out;
  for (auto& [key, facts] : groups) {
    std::sort(facts.begin(), facts.end(),
              [](const EntityRelation* a, const EntityRelation* b) { return a->key() < b->key(); });
    Binding b;
    b.values[subject->name] = table_value(key.first);
    b.values[anchor->name] = entity_value(key.second);
    BoundValue kv;
    kv.kind = SlotKind::kCount;
    kv.count = facts.size();
    b.values[k->name] = kv;
    b.entities.push_back(key.second);
    for (const EntityRelation* r : facts) {
      b.provenance.push_back(er_key(*r));
      b.entities.push_back(r->subject);
    }
    b.combo = combo(facts.front()->subject_kind, GeometryKind::kPoint);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Binding> match_join(const Template& t, const KnowledgeBase& kb) {
  const SlotSpec* left = find_role(t, SlotKind::kTable, SlotRole::kRelation1);
  const SlotSpec* right = find_role(t, SlotKind::kTable, SlotRole::kRelation2);
  const SlotSpec* dist = nullptr;
  for (const SlotSpec& s : t.slots) {
    if (s.kind == SlotKind::kDistance) dist = &s;
  }
  std::vector<Binding> out;
  for (const RelationRelation& r : kb.relation_relations) {
    if (r.query_type != t.query_type) continue;
    if (t.query_type == QueryType::kDistanceJoin && !(r.distance > 0)) continue;
    // Both join predicates are symmetric, so either table may take the left slot.
    for (int flip = 0; flip < 2; ++flip) {
      if (flip && r.relation1 == r.relation2) break;
      const std::string& a = flip ? r.relation2 : r.relation1;
      const std::string& b = flip ? r.relation1 : r.relation2;
      const GeometryKind ak = flip ? r.relation2_type : r.relation1_type;
      const GeometryKind bk = flip ? r.relation1_type : r.relation2_type;
      if (!kind_ok(left, ak) || !kind_ok(right, bk)) continue;
      Binding bind;
      bind.values[left->name] = table_value(a);
      bind.values[right->name] = table_value(b);
      if (dist) bind.values[dist->name] = distance_value(std::ceil(r.distance));
      bind.provenance.push_back(rr_key(r));
      bind.combo = combo(ak, bk);
      out.push_back(std::move(bind));
    }
  }
  return out;
}

std::vector<Binding> match_aggregation(const Template& t, const KnowledgeBase& kb, const Dataset& d) {
  const SlotSpec* subject = find_role(t, SlotKind::kTable, SlotRole::kRelation1);
  const SlotSpec* regions = find_role(t, SlotKind::kTable, SlotRole::kRelation2);
  const SlotSpec* witness = find_role(t, SlotKind::kEntity, SlotRole::kWitness);

  std::map<std::pair<std::string, std::string>, std::vector<const EntityRelation*>> inside_facts;
  if (witness) {
    for (const EntityRelation& r : kb.entity_relations) {
      if (r.op != Operator::kInside) continue;
      const Entity* s = d.find_entity(r.subject);
      const Entity* o = d.find_entity(r.object);
      if (!s || !o) continue;
      inside_facts[{s->table, o->table}].push_back(&r);
    }
  }

  std::vector<Binding> out;
  for (const RelationRelation& r : kb.relation_relations) {
    if (r.query_type != QueryType::kAggregation) continue;
    if (!kind_ok(subject, r.relation1_type) || !kind_ok(regions, r.relation2_type)) continue;
    if (!witness) {
      Binding b;
      b.values[subject->name] = table_value(r.relation1);
      if (regions) b.values[regions->name] = table_value(r.relation2);
      b.provenance.push_back(rr_key(r));
      b.combo = combo(r.relation1_type, r.relation2_type);
      out.push_back(std::move(b));
      continue;
    }
    const auto it = inside_facts.find({r.relation1, r.relation2});
    if (it == inside_facts.end()) continue;
    std::set<EntityId> used;
    for (const EntityRelation* f : it->second) {
      const Entity& region = d.entity(f->object);
      if (!kind_ok(witness, region.geometry.kind()) || !unique_name(d, region)) continue;
      if (!used.insert(region.id).second) continue;
      Binding b;
      b.values[subject->name] = table_value(r.relation1);
      if (regions) b.values[regions->name] = table_value(r.relation2);
      b.values[witness->name] = entity_value(region.id);
      b.provenance = {rr_key(r), er_key(*f)};
      b.entities = {f->subject, region.id};
      b.combo = combo(r.relation1_type, r.relation2_type);
      out.push_back(std::move(b));
    }
  }
  return out;
}

std::string render_nl(const SlotSpec& s, const BoundValue& v, const Dataset& d) {
  switch (s.kind) {
    case SlotKind::kTable: {
      const Table* t = d.find_table(v.table);
      if (!t) throw TemplateError("unknown table '" + v.table + "'");
      const std::string noun = t->label.empty() ? t->name : t->label;
      return s.plural ? pluralize(noun) : noun;
    }
    case SlotKind::kEntity:
      return d.entity(v.entity).name;
    case SlotKind::kDistance:
      return render_distance_nl(v.distance, s.unit);
    case SlotKind::kOperator: {
      const Dispatch& x = dispatch(v.object_kind);
      if (x.op != v.op) throw TemplateError("operator does not match the object kind");
      return x.nl;
    }
    case SlotKind::kCount:
      return std::to_string(v.count);
  }
  return "";
}

std::string render_exe(const SlotSpec& s, const BoundValue& v, const Dataset& d) {
  switch (s.kind) {
    case SlotKind::kTable:
      return v.table;
    case SlotKind::kEntity: {
      const Entity& e = d.entity(v.entity);
      if (s.render_point) {
        if (!e.geometry.is_point()) throw TemplateError("slot '" + s.name + "' needs a point entity");
        return query::print_point(e.geometry.as_point());
      }
      return query::quote_string(e.name);
    }
    case SlotKind::kDistance:
      return render_distance_exe(v.distance);
    case SlotKind::kOperator:
      return std::string(to_string(v.op));
    case SlotKind::kCount:
      return std::to_string(v.count);
  }
  return "";
}

}  // namespace

std::vector<std::string> placeholders(std::string_view pattern) {
  std::vector<std::string> out;
  scan_placeholders(pattern, [&](std::size_t, std::size_t, std::string_view name) {
    out.emplace_back(name);
  });
  return out;
}

bool has_placeholder(std::string_view text) {
  bool found = false;
  scan_placeholders(text, [&](std::size_t, std::size_t, std::string_view) { found = true; });
  return found;
}

TemplateLibrary parse_templates(std::string_view json_text, std::string_view source) {
  TemplateLibrary lib;
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    lib.warnings.push_back(std::string(source) + ": template file is empty");
    return lib;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TemplateError(std::string(source) + ": " + e.what());
  }
  if (!j.is_array()) throw TemplateError(std::string(source) + ": expected a JSON array of templates");
  if (j.empty()) lib.warnings.push_back(std::string(source) + ": template file is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Template t = parse_template(j[i], source, i);
    if (!ids.insert(t.id).second) throw TemplateError("duplicate template id '" + t.id + "'");
    lib.templates.push_back(std::move(t));
  }
  return lib;
}

TemplateLibrary load_templates(const std::filesystem::path& path) {
  return parse_templates(io::read_file(path), path.string());
}

std::vector<Binding> match_candidates(const Template& t, const KnowledgeBase& kb, const Dataset& d) {
  switch (t.query_type) {
    case QueryType::kRange:
      return match_range(t, kb, d);
    case QueryType::kKnn:
      return match_knn(t, kb, d);
    case QueryType::kSpatialJoin:
    case QueryType::kDistanceJoin:
      return match_join(t, kb);
    case QueryType::kAggregation:
      return match_aggregation(t, kb, d);
  }
  return {};
}

std::string render_distance_nl(double meters, std::string_view unit) {
  const double m = std::ceil(meters);
  if (unit == "km" && m >= 1000) return fmt::format("{:.1f} km", m / 1000);
  return fmt::format("{:.0f} m", m);
}

std::string render_distance_exe(double meters) { return fmt::format("{:.0f}", std::ceil(meters)); }

QueryPair instantiate(const Template& t, const Binding& b, const Dataset& d) {
  for (const SlotSpec& s : t.slots) {
    const auto it = b.values.find(s.name);
    if (it == b.values.end()) {
      throw TemplateError(fmt::format("template '{}': binding missing slot '{}'", t.id, s.name));
    }
    if (it->second.kind != s.kind) {
      throw TemplateError(fmt::format("template '{}': slot '{}' bound to a {} value", t.id, s.name,
                                      to_string(it->second.kind)));
    }
  }
  QueryPair p;
  p.template_id = t.id;
  p.query_type = t.query_type;
  p.nl = substitute(t.nl, [&](std::string_view name) {
    return render_nl(*t.slot(name), b.values.at(std::string(name)), d);
  });
  p.exe = substitute(t.exe, [&](std::string_view name) {
    return render_exe(*t.slot(name), b.values.at(std::string(name)), d);
  });
  p.binding = b.values;
  p.provenance = fmt::format("{}", fmt::join(b.provenance, ";"));
  p.entities = b.entities;
  p.combo = b.combo;
  return p;
}

void check_provenance(const QueryPair& p, const KnowledgeBase& kb) {
  if (p.provenance.empty()) throw TemplateError("pair has no provenance");
  std::size_t start = 0;
  while (start <= p.provenance.size()) {
    std::size_t end = p.provenance.find(';', start);
    if (end == std::string::npos) end = p.provenance.size();
    const std::string key = p.provenance.substr(start, end - start);
    bool found = false;
    if (key.rfind("er:", 0) == 0) {
      found = std::any_of(kb.entity_relations.begin(), kb.entity_relations.end(),
                          [&](const EntityRelation& r) { return er_key(r) == key; });
    } else if (key.rfind("rr:", 0) == 0) {
      found = std::any_of(kb.relation_relations.begin(), kb.relation_relations.end(),
                          [&](const RelationRelation& r) { return rr_key(r) == key; });
    }
    if (!found) throw TemplateError("unresolved provenance key '" + key + "'");
    start = end + 1;
  }
}

}  // namespace sscc
