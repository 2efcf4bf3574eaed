#include "sscc/knowledge_base.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "sscc/csv.hpp"
#include "sscc/io.hpp"

namespace sscc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEntityColumns{"subject",     "object",     "operator", "subject_kind",
                                              "object_kind", "distance_m", "score"};
const std::vector<std::string> kRelationColumns{"query_type",     "relation1",      "relation2",
                                                "relation1_type", "relation2_type", "distance_m",
                                                "operator",       "support",        "score"};

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

std::string fixed(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

class RowReader {
 public:
  RowReader(std::string file, const csv::Record& rec) : file_(std::move(file)), rec_(rec) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw KbError(fmt::format("{} line {}: {}", file_, rec_.line, what));
  }

  const std::string& text(std::size_t i) const { return rec_.fields[i]; }

  double number(std::size_t i) const {
    const std::string& s = rec_.fields[i];
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("invalid number '" + s + "'");
    }
    return v;
  }

  std::int64_t integer(std::size_t i) const {
    const std::string& s = rec_.fields[i];
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid integer '" + s + "'");
    return v;
  }

  template <typename F>
  auto parse(std::size_t i, F&& f, const char* what) const {
    try {
      return f(rec_.fields[i]);
    } catch (const std::exception&) {
      fail(fmt::format("unknown {} '{}'", what, rec_.fields[i]));
    }
  }

 private:
  std::string file_;
  const csv::Record& rec_;
};

std::vector<csv::Record> read_table(const fs::path& path, const std::vector<std::string>& columns) {
  if (!fs::exists(path)) throw KbError("missing " + path.filename().string());
  std::vector<csv::Record> rows;
  try {
    rows = csv::parse(io::read_file(path));
  } catch (const csv::CsvError& e) {
    throw KbError(path.filename().string() + ": " + e.what());
  }
  const std::string name = path.filename().string();
  if (rows.empty()) throw KbError(fmt::format("kb schema v{}: {} has no header", kKbSchemaVersion, name));
  const auto& header = rows[0].fields;
  for (std::size_t i = 0; i < std::max(header.size(), columns.size()); ++i) {
    const std::string got = i < header.size() ? header[i] : "<missing>";
    const std::string want = i < columns.size() ? columns[i] : "<none>";
    if (got != want) {
      throw KbError(fmt::format("kb schema v{}: {} column {} is '{}', expected '{}'", kKbSchemaVersion,
                                name, i + 1, got, want));
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].fields.size() != columns.size()) {
      throw KbError(fmt::format("{} line {}: expected {} fields, got {}", name, rows[r].line,
                                columns.size(), rows[r].fields.size()));
    }
  }
  rows.erase(rows.begin());
  return rows;
}

bool er_less(const EntityRelation& a, const EntityRelation& b) { return a.key() < b.key(); }
bool rr_less(const RelationRelation& a, const RelationRelation& b) { return a.key() < b.key(); }

}  // namespace

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  return a.entity_relations == b.entity_relations && a.relation_relations == b.relation_relations &&
         a.source_dataset == b.source_dataset && a.meta.timestamp == b.meta.timestamp &&
         to_json(a.meta.extraction) == to_json(b.meta.extraction) &&
         to_json(a.meta.quality) == to_json(b.meta.quality) && a.meta.counts == b.meta.counts;
}

void normalize(KnowledgeBase& kb) {
  for (EntityRelation& r : kb.entity_relations) {
    r.distance = round_to(r.distance, 1e3);
    r.score = round_to(r.score, 1e6);
  }
  for (RelationRelation& r : kb.relation_relations) {
    r.distance = round_to(r.distance, 1e3);
    r.score = round_to(r.score, 1e6);
  }
  std::sort(kb.entity_relations.begin(), kb.entity_relations.end(), er_less);
  std::sort(kb.relation_relations.begin(), kb.relation_relations.end(), rr_less);
}

std::vector<fs::path> save_kb(const KnowledgeBase& kb, const fs::path& dir) {
  std::vector<EntityRelation> ers = kb.entity_relations;
  std::vector<RelationRelation> rrs = kb.relation_relations;
  std::sort(ers.begin(), ers.end(), er_less);
  std::sort(rrs.begin(), rrs.end(), rr_less);

  std::string er_text = csv::join(kEntityColumns);
  for (const EntityRelation& r : ers) {
    er_text += csv::join({std::to_string(r.subject), std::to_string(r.object),
                          std::string(to_string(r.op)), std::string(to_string(r.subject_kind)),
                          std::string(to_string(r.object_kind)), fixed(r.distance, 3),
                          fixed(r.score, 6)});
  }
  std::string rr_text = csv::join(kRelationColumns);
  for (const RelationRelation& r : rrs) {
    rr_text += csv::join({std::string(to_string(r.query_type)), r.relation1, r.relation2,
                          std::string(to_string(r.relation1_type)),
                          std::string(to_string(r.relation2_type)), fixed(r.distance, 3),
                          std::string(to_string(r.op)), std::to_string(r.support),
                          fixed(r.score, 6)});
  }
  json meta{{"schema_version", kKbSchemaVersion},
            {"source_dataset", kb.source_dataset},
            {"timestamp", kb.meta.timestamp},
            {"extraction", to_json(kb.meta.extraction)},
            {"quality", to_json(kb.meta.quality)},
            {"counts", kb.meta.counts}};

  const fs::path staged = io::staging_path(dir);
  try {
    fs::create_directories(staged);
    io::write_file_atomic(staged / "entity_relations.csv", er_text);
    io::write_file_atomic(staged / "relation_relations.csv", rr_text);
    io::write_file_atomic(staged / "kb_meta.json", meta.dump(2) + "\n");
    io::replace_directory(staged, dir);
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove_all(staged, ec);
    throw io::IoError(std::string("cannot write knowledge base to ") + dir.string() + ": " + e.what());
  }
  return {dir / "entity_relations.csv", dir / "relation_relations.csv", dir / "kb_meta.json"};
}

KnowledgeBase load_kb(const fs::path& dir) {
  const fs::path meta_path = dir / "kb_meta.json";
  if (!fs::exists(meta_path)) throw KbError("missing kb_meta.json in " + dir.string());

  KnowledgeBase kb;
  try {
    const json meta = json::parse(io::read_file(meta_path));
    const int version = meta.at("schema_version").get<int>();
    if (version != kKbSchemaVersion) {
      throw KbError(fmt::format("kb schema v{} expected, found v{}", kKbSchemaVersion, version));
    }
    kb.source_dataset = meta.at("source_dataset").get<std::string>();
    kb.meta.timestamp = meta.at("timestamp").get<std::string>();
    kb.meta.extraction = extraction_config_from_json(meta.at("extraction"));
    kb.meta.quality = quality_config_from_json(meta.at("quality"));
    kb.meta.counts = meta.at("counts");
  } catch (const json::exception& e) {
    throw KbError(std::string("invalid kb_meta.json: ") + e.what());
  }
  const double threshold = kb.meta.quality.threshold;

  for (const csv::Record& rec : read_table(dir / "entity_relations.csv", kEntityColumns)) {
    RowReader row("entity_relations.csv", rec);
    EntityRelation r;
    r.subject = row.integer(0);
    r.object = row.integer(1);
    r.op = row.parse(2, parse_operator, "operator");
    r.subject_kind = row.parse(3, parse_geometry_kind, "geometry kind");
    r.object_kind = row.parse(4, parse_geometry_kind, "geometry kind");
    r.distance = row.number(5);
    r.score = row.number(6);
    if (r.op == Operator::kSymmJoin) row.fail("operator symmjoin is not an entity relation");
    if (r.subject == r.object) row.fail("subject equals object");
    if (r.distance < 0) row.fail("negative distance");
    if ((r.op == Operator::kIntersects || r.op == Operator::kInside) && r.distance != 0) {
      row.fail("operator " + std::string(to_string(r.op)) + " requires distance 0");
    }
    if (!(r.score > threshold) || r.score > 1) row.fail("score outside (threshold, 1]");
    kb.entity_relations.push_back(r);
  }
  for (const csv::Record& rec : read_table(dir / "relation_relations.csv", kRelationColumns)) {
    RowReader row("relation_relations.csv", rec);
    RelationRelation r;
    r.query_type = row.parse(0, parse_query_type, "query type");
    if (r.query_type == QueryType::kRange || r.query_type == QueryType::kKnn) {
      row.fail("query type " + row.text(0) + " is not a relation-relation type");
    }
    r.relation1 = row.text(1);
    r.relation2 = row.text(2);
    r.relation1_type = row.parse(3, parse_geometry_kind, "geometry kind");
    r.relation2_type = row.parse(4, parse_geometry_kind, "geometry kind");
    r.distance = row.number(5);
    r.op = row.parse(6, parse_operator, "operator");
    if (r.op != Operator::kSymmJoin && r.op != Operator::kDistanceScan) {
      row.fail("operator " + row.text(6) + " is not a relation-relation operator");
    }
    const std::int64_t support = row.integer(7);
    if (support < 1) row.fail("support must be at least 1");
    r.support = static_cast<std::size_t>(support);
    r.score = row.number(8);
    if ((r.distance > 0) != (r.query_type == QueryType::kDistanceJoin) || r.distance < 0) {
      row.fail("distance must be positive exactly for distance joins");
    }
    if (!(r.score > threshold) || r.score > 1) row.fail("score outside (threshold, 1]");
    kb.relation_relations.push_back(std::move(r));
  }
  std::sort(kb.entity_relations.begin(), kb.entity_relations.end(), er_less);
  std::sort(kb.relation_relations.begin(), kb.relation_relations.end(), rr_less);
  return kb;
}

void check_kb_against_dataset(const KnowledgeBase& kb, const Dataset& d) {
  for (const EntityRelation& r : kb.entity_relations) {
    for (EntityId id : {r.subject, r.object}) {
      if (!d.find_entity(id)) {
        throw KbError(fmt::format("relation references entity {} missing from dataset '{}'", id,
                                  d.name()));
      }
    }
  }
  for (const RelationRelation& r : kb.relation_relations) {
    for (const std::string& t : {r.relation1, r.relation2}) {
      if (!d.find_table(t)) {
        throw KbError(fmt::format("relation references table '{}' missing from dataset '{}'", t,
                                  d.name()));
      }
    }
  }
}

std::vector<EntityRelation> select_entity_relations(const KnowledgeBase& kb, const RelationQuery& q) {
  std::vector<EntityRelation> out;
  if (q.query_type || q.relation1_type || q.relation2_type) return out;
  for (const EntityRelation& r : kb.entity_relations) {
    if (q.op && r.op != *q.op) continue;
    if (q.subject_kind && r.subject_kind != *q.subject_kind) continue;
    if (q.object_kind && r.object_kind != *q.object_kind) continue;
    if (q.max_distance && r.distance > *q.max_distance) continue;
    if (q.min_score && r.score < *q.min_score) continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const EntityRelation& a, const EntityRelation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key() < b.key();
  });
  return out;
}

std::vector<RelationRelation> select_relation_relations(const KnowledgeBase& kb,
                                                        const RelationQuery& q) {
  std::vector<RelationRelation> out;
  if (q.subject_kind || q.object_kind) return out;
  for (const RelationRelation& r : kb.relation_relations) {
    if (q.op && r.op != *q.op) continue;
    if (q.query_type && r.query_type != *q.query_type) continue;
    if (q.relation1_type && r.relation1_type != *q.relation1_type) continue;
    if (q.relation2_type && r.relation2_type != *q.relation2_type) continue;
    if (q.max_distance && r.distance > *q.max_distance) continue;
    if (q.min_score && r.score < *q.min_score) continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const RelationRelation& a, const RelationRelation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key() < b.key();
  });
  return out;
}

}  // namespace sscc
