#include <gtest/gtest.h>

#include <regex>

#include "sscc/templates.hpp"

namespace sscc {
namespace {

Geometry square(double x0, double y0, double x1, double y1) {
  return Geometry::region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Kinos (cinemas), Plaetze (plazas as points), Bezirke (districts) and Strassen (streets).
Dataset city() {
  return Dataset("city", "",
                 {{"Kinos", GeometryKind::kPoint, "cinema",
                   {{1, "Zoo Palast", "Kinos", Geometry::point(0, 0), {}},
                    {2, "Babylon", "Kinos", Geometry::point(100, 0), {}}}},
                  {"Plaetze", GeometryKind::kPoint, "plaza",
                   {{10, "Alexanderplatz", "Plaetze", Geometry::point(800, 0), {}}}},
                  {"Bezirke", GeometryKind::kRegion, "district",
                   {{20, "Mitte", "Bezirke", square(-50, -50, 150, 50), {}}}},
                  {"Strassen", GeometryKind::kLine, "street",
                   {{30, "Unter den Linden", "Strassen", Geometry::line({{0, -10}, {0, 10}}), {}}}}});
}

EntityRelation fact(EntityId s, EntityId o, Operator op, double dist, GeometryKind sk, GeometryKind ok) {
  return {s, o, op, dist, sk, ok, 0.9};
}

const Template& by_id(std::string_view id) {
  for (const Template& t : default_templates().templates) {
    if (t.id == id) return t;
  }
  throw std::logic_error("no template " + std::string(id));
}

TEST(Library, DefaultCoversAllFiveTypes) {
  const TemplateLibrary& lib = default_templates();
  EXPECT_EQ(lib.templates.size(), 15u);
  for (QueryType qt : kAllQueryTypes) EXPECT_EQ(lib.count(qt), 3u) << to_string(qt);
  EXPECT_TRUE(lib.warnings.empty());
}

TEST(Library, SlotSetMismatchIsRejected) {
  const std::string json = R"([{"id": "bad", "query_type": "range",
    "nl": "Which {subject} are within {distance} of {reference}?",
    "exe": "query {subject} feed filter[distance(.geom, ref({reference})) < 100] consume",
    "slots": [{"name": "subject", "kind": "table", "role": "subject"},
              {"name": "reference", "kind": "entity", "role": "object"},
              {"name": "distance", "kind": "distance", "unit": "m"}]}])";
  try {
    parse_templates(json);
    FAIL();
  } catch (const TemplateError& e) {
    EXPECT_NE(std::string(e.what()).find("'bad'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("distance"), std::string::npos) << e.what();
  }
}

TEST(Library, EmptyFileWarns) {
  const TemplateLibrary lib = parse_templates("  \n", "t.json");
  EXPECT_TRUE(lib.templates.empty());
  ASSERT_EQ(lib.warnings.size(), 1u);
  EXPECT_EQ(lib.warnings[0], "t.json: template file is empty");
  EXPECT_EQ(parse_templates("[]").warnings.size(), 1u);
}

TEST(Library, OtherLoadErrors) {
  EXPECT_THROW(parse_templates(R"([{"id": "x", "query_type": "topk", "nl": "", "exe": "", "slots": []}])"),
               TemplateError);
  EXPECT_THROW(parse_templates("{not json"), TemplateError);
  // Range template without any distance or operator slot.
  EXPECT_THROW(parse_templates(R"([{"id": "x", "query_type": "range", "nl": "{s} {r}",
    "exe": "query {s} feed filter[.geom intersects ref({r})] consume",
    "slots": [{"name": "s", "kind": "table", "role": "subject"}, {"name": "r", "kind": "entity", "role": "object"}]}])"),
               TemplateError);
  // Exe pattern that cannot parse once canaries are substituted.
  EXPECT_THROW(parse_templates(R"([{"id": "x", "query_type": "spatial_join", "nl": "{a} {b}",
    "exe": "query {a} feed symmjoin[ {b} feed consume",
    "slots": [{"name": "a", "kind": "table", "role": "relation1"}, {"name": "b", "kind": "table", "role": "relation2"}]}])"),
               TemplateError);
}

TEST(Placeholders, Scanning) {
  EXPECT_EQ(placeholders("a {x} b {y_z} {x} {n1}"), (std::vector<std::string>{"x", "y_z", "x"}));
  EXPECT_TRUE(has_placeholder("left {over}"));
  EXPECT_FALSE(has_placeholder("no {} here {1"));
}

TEST(Distance, Rendering) {
  EXPECT_EQ(render_distance_nl(2000, "km"), "2.0 km");
  EXPECT_EQ(render_distance_nl(1260, "km"), "1.3 km");
  EXPECT_EQ(render_distance_nl(800, "km"), "800 m");
  EXPECT_EQ(render_distance_nl(799.2, "m"), "800 m");
  EXPECT_EQ(render_distance_exe(2000), "2000");
  EXPECT_EQ(render_distance_exe(799.2), "800");
}

TEST(Match, SingleDistanceFactGivesOneBinding) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 10, Operator::kDistanceScan, 800, GeometryKind::kPoint, GeometryKind::kPoint)};
  const auto bindings = match_candidates(by_id("range_less_than_m"), kb, d);
  ASSERT_EQ(bindings.size(), 1u);
  const Binding& b = bindings[0];
  EXPECT_EQ(b.values.at("subject").table, "Kinos");
  EXPECT_EQ(b.values.at("reference").entity, 10);
  EXPECT_EQ(b.values.at("distance").distance, 800.0);
  EXPECT_EQ(b.provenance, (std::vector<std::string>{"er:1:10:distancescan"}));
  const QueryPair p = instantiate(by_id("range_less_than_m"), b, d);
  EXPECT_EQ(p.nl, "List the cinemas less than 800 m away from Alexanderplatz.");
  EXPECT_EQ(p.exe, "query Kinos feed filter[distance(.geom, ref(\"Alexanderplatz\")) < 800] consume");
}

TEST(Instantiate, KilometreRangeExample) {
  const TemplateLibrary lib = parse_templates(R"([{"id": "cinemas_km", "query_type": "range",
    "nl": "Which {entity_type}s are within {distance} of {reference}?",
    "exe": "query {entity_type} feed filter[distance(.geom, ref({reference})) < {distance}] consume",
    "distance_unit": "km",
    "slots": [{"name": "entity_type", "kind": "table", "role": "subject", "plural": false},
              {"name": "reference", "kind": "entity", "role": "object", "geometry_constraint": "any"},
              {"name": "distance", "kind": "distance", "unit": "km"}]}])");
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 10, Operator::kDistanceScan, 2000, GeometryKind::kPoint, GeometryKind::kPoint)};
  const auto bindings = match_candidates(lib.templates[0], kb, d);
  ASSERT_EQ(bindings.size(), 1u);
  const QueryPair p = instantiate(lib.templates[0], bindings[0], d);
  EXPECT_EQ(p.nl, "Which cinemas are within 2.0 km of Alexanderplatz?");
  EXPECT_EQ(p.exe, "query Kinos feed filter[distance(.geom, ref(\"Alexanderplatz\")) < 2000] consume");
  EXPECT_EQ(instantiate(lib.templates[0], bindings[0], d), p);
}

TEST(Instantiate, ContainmentDispatchesOnObjectKind) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion),
                         fact(1, 30, Operator::kDistanceScan, 0, GeometryKind::kPoint, GeometryKind::kLine)};
  const Template& t = by_id("range_containment");
  const auto bindings = match_candidates(t, kb, d);
  ASSERT_EQ(bindings.size(), 2u);
  const QueryPair region = instantiate(t, bindings[0], d);
  EXPECT_EQ(region.exe, "query Kinos feed filter[.geom inside ref(\"Mitte\")] consume");
  EXPECT_EQ(region.nl, "Which cinemas are inside Mitte?");
  const QueryPair line = instantiate(t, bindings[1], d);
  EXPECT_EQ(line.exe, "query Kinos feed filter[.geom intersects ref(\"Unter den Linden\")] consume");
  EXPECT_EQ(line.nl, "Which cinemas are on Unter den Linden?");
}

TEST(Match, JoinWithoutRelationRecordsIsEmpty) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion)};
  EXPECT_TRUE(match_candidates(by_id("join_intersect_pairs"), kb, d).empty());
}

TEST(Match, KnnConstraintExcludesRegionSubjects) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(20, 10, Operator::kDistanceScan, 700, GeometryKind::kRegion, GeometryKind::kPoint)};
  EXPECT_TRUE(match_candidates(by_id("knn_point_sites"), kb, d).empty());
  const auto any = match_candidates(by_id("knn_nearest"), kb, d);
  ASSERT_EQ(any.size(), 1u);
  const QueryPair p = instantiate(by_id("knn_nearest"), any[0], d);
  EXPECT_EQ(p.exe, "query Bezirke feed distancescan[POINT (800 0), 1] consume");
  EXPECT_EQ(p.nl, "What are the 1 nearest districts to Alexanderplatz?");
}

TEST(Match, JoinsBindBothOrientationsWithCeiledRadius) {
  const Dataset d = city();
  KnowledgeBase kb;
  RelationRelation rr;
  rr.query_type = QueryType::kDistanceJoin;
  rr.relation1 = "Kinos";
  rr.relation2 = "Plaetze";
  rr.distance = 999.5;
  rr.op = Operator::kDistanceScan;
  rr.support = 3;
  kb.relation_relations = {rr};
  const auto bindings = match_candidates(by_id("djoin_pairs_m"), kb, d);
  ASSERT_EQ(bindings.size(), 2u);
  EXPECT_EQ(bindings[0].values.at("left").table, "Kinos");
  EXPECT_EQ(bindings[1].values.at("left").table, "Plaetze");
  EXPECT_EQ(bindings[0].values.at("distance").distance, 1000.0);
  EXPECT_EQ(bindings[0].provenance, (std::vector<std::string>{"rr:distance_join:Kinos:Plaetze"}));
  const QueryPair p = instantiate(by_id("djoin_within_km"), match_candidates(by_id("djoin_within_km"), kb, d)[0], d);
  EXPECT_EQ(p.nl, "Which cinemas are within 1.0 km of a plaza?");
}

TEST(Match, AggregationWitnessesComeFromInsideFacts) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion),
                         fact(2, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion)};
  RelationRelation rr;
  rr.query_type = QueryType::kAggregation;
  rr.relation1 = "Kinos";
  rr.relation2 = "Bezirke";
  rr.relation2_type = GeometryKind::kRegion;
  rr.support = 2;
  kb.relation_relations = {rr};
  const auto bindings = match_candidates(by_id("agg_count_in_region"), kb, d);
  ASSERT_EQ(bindings.size(), 1u);
  const QueryPair p = instantiate(by_id("agg_count_in_region"), bindings[0], d);
  EXPECT_EQ(p.exe, "query Kinos feed filter[.geom inside ref(\"Mitte\")] count");
  EXPECT_EQ(p.provenance, "rr:aggregation:Kinos:Bezirke;er:1:20:inside");
  EXPECT_NO_THROW(check_provenance(p, kb));
  QueryPair dangling = p;
  dangling.provenance = "er:9:9:inside";
  EXPECT_THROW(check_provenance(dangling, kb), TemplateError);
}

TEST(Instantiate, MissingSlotIsAnError) {
  const Dataset d = city();
  Binding b;
  b.values["subject"] = {SlotKind::kTable, 0, "Kinos"};
  EXPECT_THROW(instantiate(by_id("range_less_than_m"), b, d), TemplateError);
}

TEST(Instantiate, DefaultLibraryLeavesNoPlaceholders) {
  const Dataset d = city();
  KnowledgeBase kb;
  kb.entity_relations = {fact(1, 10, Operator::kDistanceScan, 800, GeometryKind::kPoint, GeometryKind::kPoint),
                         fact(1, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion),
                         fact(2, 20, Operator::kInside, 0, GeometryKind::kPoint, GeometryKind::kRegion)};
  for (QueryType qt : {QueryType::kSpatialJoin, QueryType::kDistanceJoin, QueryType::kAggregation}) {
    RelationRelation rr;
    rr.query_type = qt;
    rr.relation1 = "Kinos";
    rr.relation2 = "Bezirke";
    rr.relation2_type = GeometryKind::kRegion;
    rr.distance = qt == QueryType::kDistanceJoin ? 500 : 0;
    rr.support = 2;
    kb.relation_relations.push_back(rr);
  }
  const std::regex dangling(R"(\{[A-Za-z_]+\})");
  std::size_t produced = 0;
  for (const Template& t : default_templates().templates) {
    for (const Binding& b : match_candidates(t, kb, d)) {
      const QueryPair p = instantiate(t, b, d);
      EXPECT_FALSE(std::regex_search(p.nl, dangling)) << p.nl;
      EXPECT_FALSE(std::regex_search(p.exe, dangling)) << p.exe;
      EXPECT_NO_THROW(check_provenance(p, kb));
      ++produced;
    }
  }
  EXPECT_GT(produced, 10u);
}

}  // namespace
}  // namespace sscc
