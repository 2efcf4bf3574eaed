// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Usage: acceptance <work-dir>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "sscc/csv.hpp"
#include "sscc/io.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/quality.hpp"
#include "sscc/query.hpp"
#include "sscc/sampler.hpp"
#include "sscc/templates.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using namespace sscc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << "  sscc " << args.front() << " exited " << code << ": " << err.str();
  return code;
}

Outcome throughput(const fs::path& work) {
  if (cli({"synth", "--profile", "nanjing", "--seed", "42", "-o", (work / "nanjing").string()}) != 0) {
    return {false, "synth failed"};
  }
  const auto start = Clock::now();
  if (cli({"build-kb", (work / "nanjing").string(), "-o", (work / "kb").string()}) != 0) {
    return {false, "build-kb failed"};
  }
  const double wall = seconds_since(start);
  const json m = json::parse(io::read_file(work / "kb.manifest.json"));
  const auto retained = m.at("items").get<std::size_t>();
  const double rate = static_cast<double>(retained) / wall;
  return {retained >= 10000 && rate >= 65.5 && wall < 210,
          fmt::format("{} relations retained in {:.1f} s ({:.1f}/s)", retained, wall, rate)};
}

Outcome validity(const fs::path& work) {
  const auto start = Clock::now();
  const std::string corpus = (work / "corpus.csv").string();
  if (cli({"generate", (work / "nanjing").string(), (work / "kb").string(), "-n", "156", "--seed", "42", "-o",
           corpus}) != 0) {
    return {false, "generate failed"};
  }
  const int code = cli({"validate", (work / "nanjing").string(), corpus, "--min-validity", "95"});
  const double wall = seconds_since(start);
  const auto rows = csv::parse(io::read_file(corpus + ".validation.csv"));
  std::size_t valid = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) valid += rows[i].fields.at(1) == "valid";
  const std::size_t total = rows.empty() ? 0 : rows.size() - 1;
  const double pct = total ? 100.0 * static_cast<double>(valid) / static_cast<double>(total) : 0.0;
  return {code == 0 && total == 156 && pct >= 95 && wall <= 30,
          fmt::format("{}/{} valid ({:.1f}%) in {:.1f} s", valid, total, pct, wall)};
}

Outcome statistics() {
  const DatasetStats b = dataset_stats(synthesize_dataset(berlin_profile(1)));
  const DatasetStats n = dataset_stats(synthesize_dataset(nanjing_profile(1)));
  const bool ok = b.n_tables == 24 && b.n_points == 1898 && b.n_lines == 4356 && b.n_regions == 261 &&
                  b.n_entities == 6515 && n.n_tables == 18 && n.n_points == 2321 && n.n_lines == 8407 &&
                  n.n_regions == 1942 && n.n_entities == 12670;
  return {ok, fmt::format("berlin {}/{}/{}/{} total {}, nanjing {}/{}/{}/{} total {}", b.n_tables, b.n_points,
                          b.n_lines, b.n_regions, b.n_entities, n.n_tables, n.n_points, n.n_lines, n.n_regions,
                          n.n_entities)};
}

Outcome index_oracle() {
  std::mt19937_64 rng(4);
  std::size_t trials = 0, mismatches = 0;
  for (int t = 0; t < 500; ++t, ++trials) {
    std::unordered_map<ItemId, Geometry> geoms;
    std::vector<IndexEntry> entries;
    const std::size_t n = 1 + rng() % 150;
    for (std::size_t i = 0; i < n; ++i) {
      const ItemId id = static_cast<ItemId>(i + 1);
      Geometry g = [&] {
        switch (rng() % 3) {
          case 0: {
            Point p = oracle::random_point(rng, 0, 1000);
            if (t % 4 == 0) p = {std::round(p.x / 100) * 100, std::round(p.y / 100) * 100};
            return Geometry::point(p.x, p.y);
          }
          case 1:
            return oracle::random_segment(rng, 0, 1000);
          default:
            return oracle::random_convex(rng, 0, 1000, 60);
        }
      }();
      entries.push_back({id, g.bbox()});
      geoms.emplace(id, std::move(g));
    }
    const StrTree tree = StrTree::build(entries, 2 + t % 15);
    const auto lookup = [&](ItemId id) -> const Geometry& { return geoms.at(id); };
    std::vector<ItemId> ids;
    for (const auto& e : entries) ids.push_back(e.item_id);

    const Point c = oracle::random_point(rng, -100, 1100);
    const double side = std::uniform_real_distribution<double>(0, 400)(rng);
    const BoundingBox win{c.x, c.y, c.x + side, c.y + side};
    if (tree.query_bbox(win) != oracle::bbox_scan(entries, win)) ++mismatches;

    const std::size_t k = 1 + rng() % 10;
    const Geometry og = Geometry::point(c.x, c.y);
    if (tree.nearest_k(c, k, lookup) != oracle::knn_scan(ids, k, [&](ItemId id) { return distance(og, geoms.at(id)); })) {
      ++mismatches;
    }
    const Geometry origin = oracle::random_convex(rng, 0, 1000, 50);
    const double radius = t % 2 ? 120.0 : std::numeric_limits<double>::infinity();
    const auto exclude = [](ItemId id) { return id % 5 == 0; };
    std::vector<ItemId> kept;
    for (ItemId id : ids) {
      if (!exclude(id)) kept.push_back(id);
    }
    if (tree.nearest_k(origin, k, lookup, radius, exclude) !=
        oracle::knn_scan(kept, k, [&](ItemId id) { return distance(origin, geoms.at(id)); }, radius)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("{} trials, {} mismatches", trials, mismatches)};
}

Outcome extraction_oracle() {
  std::mt19937_64 rng(5);
  std::size_t mismatches = 0, facts = 0;
  for (int t = 0; t < 50; ++t) {
    const Dataset d = oracle::random_dataset(rng, 200);
    ExtractionConfig cfg;
    cfg.k = 1 + t % 5;
    cfg.radius_m = t % 2 ? 150 : 400;
    cfg.node_capacity = 2 + t % 10;
    const auto got = extract_entity_relations(d, build_dataset_index(d, cfg.node_capacity), cfg);
    facts += got.size();
    if (got != oracle::extract_exhaustive(d, cfg)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("50 datasets, {} facts, {} mismatches", facts, mismatches)};
}

Geometry random_geometry(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: {
      const Point p = oracle::random_point(rng, 0, 100);
      return Geometry::point(p.x, p.y);
    }
    case 1:
      return oracle::random_segment(rng, 0, 100);
    default:
      return oracle::random_convex(rng, 0, 100, 30);
  }
}

struct Scored {
  double score;
  Operator op = Operator::kIntersects;
  bool operator==(const Scored&) const = default;
};

Outcome quality_properties() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t range = 0, monotone = 0, filter = 0;
  const Operator ops[] = {Operator::kIntersects, Operator::kInside, Operator::kDistanceScan};
  for (int t = 0; t < 1000; ++t) {
    QualityConfig cfg;
    cfg.lambda_m = 10 + u(rng) * 5000;
    Geometry a = random_geometry(rng), b = random_geometry(rng);
    const GeometryKind ka = a.kind(), kb = b.kind();
    const Dataset d("q", "", {{"A", ka, "a", {{1, "one", "A", std::move(a), {}}}},
                              {"B", kb, "b", {{2, "two", "B", std::move(b), {}}}}});
    EntityRelation r{1, 2, ops[t % 3], distance(d.entity(1).geometry, d.entity(2).geometry), ka, kb, 0};
    double prev = score_entity_relation(r, d, cfg);
    bool ok = prev >= 0 && prev <= 1;
    bool mono = true;
    for (double extra : {1.0, 50.0, 2000.0}) {
      r.distance += extra;
      const double next = score_entity_relation(r, d, cfg);
      ok = ok && next >= 0 && next <= 1;
      mono = mono && next <= prev;
      prev = next;
    }
    RelationRelation rr;
    rr.query_type = kAllQueryTypes[2 + t % 3];
    rr.distance = rr.query_type == QueryType::kDistanceJoin ? 1000 : 0;
    std::vector<Witness> members(1 + rng() % 10);
    for (Witness& m : members) m = {1, 2, u(rng) < 0.3 ? 0 : u(rng) * 3000, u(rng)};
    const double s = score_relation_relation(rr, members, cfg);
    range += ok && s >= 0 && s <= 1;
    monotone += mono;

    std::vector<Scored> xs(rng() % 40);
    for (auto& x : xs) x.score = std::round(u(rng) * 20) / 20;
    QualityConfig lo, hi;
    lo.threshold = std::round(u(rng) * 10) / 10;
    hi.threshold = std::min(1.0, lo.threshold + u(rng) * 0.5);
    const auto once = filter_by_threshold(xs, lo);
    const auto higher = filter_by_threshold(xs, hi);
    filter += filter_by_threshold(once, lo) == once && filter_by_threshold(once, hi) == higher &&
              higher.size() <= once.size();
  }
  return {range == 1000 && monotone == 1000 && filter == 1000,
          fmt::format("range {}/1000, monotonicity {}/1000, filter {}/1000", range, monotone, filter)};
}

Outcome corpus_invariants(const fs::path& work) {
  const Dataset d = load_dataset(work / "nanjing");
  const KnowledgeBase kb = load_kb(work / "kb");
  SamplerConfig cfg;
  cfg.seed = 42;
  const Corpus a = generate_corpus(kb, default_templates(), d, cfg);
  const Corpus b = generate_corpus(kb, default_templates(), d, cfg);
  std::vector<std::string> problems;

  std::size_t lo = SIZE_MAX, hi = 0;
  for (QueryType qt : kAllQueryTypes) {
    const std::size_t n = a.report.per_type.count(qt) ? a.report.per_type.at(qt) : 0;
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  if (hi - lo > 1) problems.push_back(fmt::format("balance gap {}", hi - lo));

  std::map<EntityId, std::size_t> uses;
  std::size_t dangling = 0, unresolved = 0;
  for (const QueryPair& p : a.pairs) {
    for (EntityId e : std::set<EntityId>(p.entities.begin(), p.entities.end())) ++uses[e];
    dangling += has_placeholder(p.nl) || has_placeholder(p.exe);
    try {
      check_provenance(p, kb);
    } catch (const std::exception&) {
      ++unresolved;
    }
  }
  std::size_t max_use = 0;
  for (const auto& [id, n] : uses) max_use = std::max(max_use, n);
  if (max_use > cfg.entity_cap) problems.push_back(fmt::format("entity used {} times", max_use));
  if (dangling) problems.push_back(fmt::format("{} dangling placeholders", dangling));
  if (unresolved) problems.push_back(fmt::format("{} unresolved provenance", unresolved));
  if (corpus_csv(a.pairs) != corpus_csv(b.pairs)) problems.push_back("reruns differ");
  if (a.pairs.size() != 100) problems.push_back(fmt::format("{} pairs", a.pairs.size()));

  std::string detail = fmt::format("{} pairs, balance gap {}, max entity use {}", a.pairs.size(), hi - lo, max_use);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

Outcome parser_robustness() {
  std::mt19937_64 rng(8);
  std::size_t accepted = 0, escaped = 0;
  for (int t = 0; t < 10000; ++t) {
    std::string s(rng() % 80, '\0');
    for (char& c : s) c = static_cast<char>(rng() % 256);
    try {
      query::parse_query(s);
      ++accepted;
    } catch (const query::QueryError&) {
    } catch (...) {
      ++escaped;
    }
  }
  std::size_t canaries = 0, unstable = 0;
  for (const Template& t : default_templates().templates) {
    std::string exe = t.exe;
    for (const SlotSpec& s : t.slots) {
      std::string value;
      switch (s.kind) {
        case SlotKind::kEntity:
          value = s.render_point ? "POINT (1 2)" : "\"E\"";
          break;
        case SlotKind::kTable:
          value = "T";
          break;
        case SlotKind::kDistance:
          value = "100";
          break;
        case SlotKind::kOperator:
          value = "inside";
          break;
        case SlotKind::kCount:
          value = "3";
          break;
      }
      const std::string ph = "{" + s.name + "}";
      for (std::size_t at; (at = exe.find(ph)) != std::string::npos;) exe.replace(at, ph.size(), value);
    }
    ++canaries;
    try {
      const std::string once = query::print_query(query::parse_query(exe));
      if (query::print_query(query::parse_query(once)) != once) ++unstable;
    } catch (const std::exception&) {
      ++unstable;
    }
  }
  return {escaped == 0 && unstable == 0,
          fmt::format("10000 random inputs ({} accepted, {} escaped), {} canaries, {} unstable", accepted, escaped,
                      canaries, unstable)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sscc_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"build-kb throughput", [&] { return throughput(work); }},
      {"query pair validity", [&] { return validity(work); }},
      {"dataset statistics", statistics},
      {"index oracle", index_oracle},
      {"extraction oracle", extraction_oracle},
      {"quality properties", quality_properties},
      {"corpus invariants", [&] { return corpus_invariants(work); }},
      {"parser robustness", parser_robustness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("{} criterion {}: {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                             o.detail)
              << std::flush;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
