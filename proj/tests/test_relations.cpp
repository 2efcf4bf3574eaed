#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "sscc/relations.hpp"

namespace sscc {
namespace {

Geometry square(double x0, double y0, double x1, double y1) {
  return Geometry::region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Dataset two_tables(std::vector<Entity> a, GeometryKind ka, std::vector<Entity> b, GeometryKind kb) {
  for (auto& e : a) e.table = "A";
  for (auto& e : b) e.table = "B";
  return Dataset("toy", "", {{"A", ka, "a", std::move(a)}, {"B", kb, "b", std::move(b)}});
}

Entity entity(EntityId id, Geometry g) { return {id, "E" + std::to_string(id), "", std::move(g), {}}; }

std::vector<EntityRelation> extract(const Dataset& d, const ExtractionConfig& cfg) {
  return extract_entity_relations(d, build_dataset_index(d, cfg.node_capacity), cfg);
}

TEST(EntityRelations, PointInsideSquare) {
  const Dataset d = two_tables({entity(1, Geometry::point(0.5, 0.5))}, GeometryKind::kPoint,
                               {entity(2, square(0, 0, 1, 1))}, GeometryKind::kRegion);
  ExtractionConfig cfg;
  cfg.k = 1;
  cfg.radius_m = 10'000;
  std::set<Operator> ops;
  for (const auto& f : extract(d, cfg)) {
    if (f.subject != 1) continue;
    EXPECT_EQ(f.object, 2);
    EXPECT_EQ(f.distance, 0.0);
    ops.insert(f.op);
  }
  EXPECT_EQ(ops, (std::set<Operator>{Operator::kIntersects, Operator::kInside, Operator::kDistanceScan}));
}

TEST(EntityRelations, FarApartPointsGiveNothing) {
  const Dataset d = two_tables({entity(1, Geometry::point(0, 0))}, GeometryKind::kPoint,
                               {entity(2, Geometry::point(50'000, 0))}, GeometryKind::kPoint);
  ExtractionConfig cfg;
  cfg.radius_m = 5'000;
  EXPECT_TRUE(extract(d, cfg).empty());
}

TEST(EntityRelations, ToyDatasetMatchesExhaustive) {
  std::vector<Entity> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(entity(i + 1, Geometry::point(i * 3.0, 1)));
  const Dataset d = two_tables(std::move(pts), GeometryKind::kPoint, {entity(9, square(0, 0, 5, 5))},
                               GeometryKind::kRegion);
  ExtractionConfig cfg;
  cfg.k = 2;
  EXPECT_EQ(extract(d, cfg), oracle::extract_exhaustive(d, cfg));
}

TEST(EntityRelations, StaleIndexIsRejected) {
  std::mt19937_64 rng(2);
  const Dataset d = oracle::random_dataset(rng, 30);
  const Dataset other = oracle::random_dataset(rng, 60);
  try {
    extract_entity_relations(d, build_dataset_index(other), ExtractionConfig{});
    FAIL();
  } catch (const ExtractionError& e) {
    EXPECT_STREQ(e.what(), "stale index");
  }
}

TEST(EntityRelations, MatchesExhaustiveOracleOnRandomDatasets) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 200);
    ExtractionConfig cfg;
    cfg.k = 1 + trial % 4;
    cfg.radius_m = trial % 3 == 0 ? 150 : 400;
    cfg.node_capacity = 2 + trial % 9;
    if (trial % 5 == 0) cfg.reference_tables = {"R", "L"};
    ASSERT_EQ(extract(d, cfg), oracle::extract_exhaustive(d, cfg)) << trial;
  }
}

TEST(EntityRelations, FactsAreOperatorConsistent) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 150);
    ExtractionConfig cfg;
    cfg.radius_m = 300;
    for (const auto& f : extract(d, cfg)) {
      ASSERT_NE(f.subject, f.object);
      const Geometry& a = d.entity(f.subject).geometry;
      const Geometry& b = d.entity(f.object).geometry;
      ASSERT_NEAR(f.distance, distance(a, b), 1e-9);
      ASSERT_EQ(f.subject_kind, a.kind());
      ASSERT_EQ(f.object_kind, b.kind());
      if (f.op == Operator::kIntersects) {
        ASSERT_EQ(f.distance, 0.0);
      }
      if (f.op == Operator::kInside) {
        ASSERT_TRUE(intersects(a, b));
      }
      if (f.op == Operator::kDistanceScan) {
        ASSERT_LE(f.distance, cfg.radius_m);
      }
    }
  }
}

TEST(EntityRelations, WorkerCountDoesNotChangeOutput) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 200);
    ExtractionConfig cfg;
    const auto serial = extract(d, cfg);
    for (std::size_t jobs : {2u, 3u, 8u}) {
      cfg.jobs = jobs;
      EXPECT_EQ(extract(d, cfg), serial);
    }
  }
}

TEST(EntityRelations, LargerRadiusNeverRemovesFacts) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 120);
    ExtractionConfig small, large;
    small.radius_m = 50 + trial * 10;
    large.radius_m = small.radius_m * 2;
    const auto a = extract(d, small);
    const auto b = extract(d, large);
    std::set<std::tuple<EntityId, EntityId, Operator>> keys;
    for (const auto& f : b) keys.insert(f.key());
    for (const auto& f : a) ASSERT_TRUE(keys.count(f.key())) << trial;
  }
}

EntityRelation fact(EntityId s, EntityId o, Operator op, double dist = 0) {
  return {s, o, op, dist, GeometryKind::kPoint, GeometryKind::kPoint, 0.5};
}

TEST(RelationRelations, ThreeIntersectFactsGiveSpatialJoin) {
  std::vector<Entity> a, b;
  for (int i = 1; i <= 3; ++i) a.push_back(entity(i, Geometry::point(i, 0)));
  for (int i = 4; i <= 6; ++i) b.push_back(entity(i, Geometry::line({{double(i), -1}, {double(i), 1}})));
  const Dataset d = two_tables(a, GeometryKind::kPoint, b, GeometryKind::kLine);
  ExtractionConfig cfg;
  cfg.min_support = 2;
  const auto rrs = extract_relation_relations(
      d, {fact(1, 4, Operator::kIntersects), fact(2, 5, Operator::kIntersects), fact(3, 6, Operator::kIntersects)},
      cfg);
  ASSERT_EQ(rrs.size(), 1u);
  EXPECT_EQ(rrs[0].query_type, QueryType::kSpatialJoin);
  EXPECT_EQ(rrs[0].op, Operator::kSymmJoin);
  EXPECT_EQ(rrs[0].relation1, "A");
  EXPECT_EQ(rrs[0].relation2, "B");
  EXPECT_EQ(rrs[0].relation2_type, GeometryKind::kLine);
  EXPECT_EQ(rrs[0].support, 3u);
  EXPECT_EQ(rrs[0].distance, 0.0);
}

TEST(RelationRelations, BothOrientationsCountOnce) {
  const Dataset d = two_tables({entity(1, Geometry::point(0, 0))}, GeometryKind::kPoint,
                               {entity(2, Geometry::point(0, 0))}, GeometryKind::kPoint);
  ExtractionConfig cfg;
  cfg.min_support = 1;
  const auto rrs =
      extract_relation_relations(d, {fact(1, 2, Operator::kIntersects), fact(2, 1, Operator::kIntersects)}, cfg);
  ASSERT_EQ(rrs.size(), 1u);
  EXPECT_EQ(rrs[0].support, 1u);
}

TEST(RelationRelations, NoFactsNoRecords) {
  std::mt19937_64 rng(4);
  EXPECT_TRUE(extract_relation_relations(oracle::random_dataset(rng, 30), {}, ExtractionConfig{}).empty());
}

TEST(RelationRelations, BelowSupportIsDropped) {
  const Dataset d = two_tables({entity(1, Geometry::point(0, 0))}, GeometryKind::kPoint,
                               {entity(2, Geometry::point(0, 0))}, GeometryKind::kPoint);
  EXPECT_TRUE(extract_relation_relations(d, {fact(1, 2, Operator::kIntersects)}, ExtractionConfig{}).empty());
}

TEST(RelationRelations, DistanceJoinRadiusFromNinetiethPercentile) {
  std::vector<Entity> a, b;
  for (int i = 1; i <= 3; ++i) a.push_back(entity(i, Geometry::point(0, i * 10.0)));
  for (int i = 4; i <= 6; ++i) b.push_back(entity(i, Geometry::point(1000, i * 10.0)));
  const Dataset d = two_tables(a, GeometryKind::kPoint, b, GeometryKind::kPoint);
  ExtractionConfig cfg;
  cfg.distance_grid_m = 500;
  const auto rrs = extract_relation_relations(d,
                                              {fact(1, 4, Operator::kDistanceScan, 120),
                                               fact(2, 5, Operator::kDistanceScan, 800),
                                               fact(3, 6, Operator::kDistanceScan, 950)},
                                              cfg);
  ASSERT_EQ(rrs.size(), 1u);
  EXPECT_EQ(rrs[0].query_type, QueryType::kDistanceJoin);
  EXPECT_EQ(rrs[0].distance, 1000.0);
}

TEST(RelationRelations, JoinRadiusIsStrictlyAboveThePercentile) {
  EXPECT_EQ(join_radius({120, 800, 950}, 500), 1000.0);
  EXPECT_EQ(join_radius({1000}, 500), 1500.0);
  EXPECT_EQ(join_radius({0}, 500), 500.0);
  std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 1000};
  EXPECT_EQ(join_radius(ten, 100), 100.0);
}

TEST(RelationRelations, AggregationCountsInsideFactsPerRegionTable) {
  std::vector<Entity> pts;
  for (int i = 1; i <= 3; ++i) pts.push_back(entity(i, Geometry::point(i, 1)));
  const Dataset d = two_tables(pts, GeometryKind::kPoint, {entity(9, square(0, 0, 5, 5))}, GeometryKind::kRegion);
  ExtractionConfig cfg;
  cfg.min_support = 3;
  const auto rrs = extract_relation_relations(
      d, {fact(1, 9, Operator::kInside), fact(2, 9, Operator::kInside), fact(3, 9, Operator::kInside)}, cfg);
  ASSERT_EQ(rrs.size(), 1u);
  EXPECT_EQ(rrs[0].query_type, QueryType::kAggregation);
  EXPECT_EQ(rrs[0].relation1, "A");
  EXPECT_EQ(rrs[0].relation2, "B");
  EXPECT_EQ(rrs[0].support, 3u);
}

TEST(RelationRelations, InvariantsOnRandomData) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 200);
    ExtractionConfig cfg;
    cfg.radius_m = 300;
    cfg.min_support = 1 + trial % 3;
    for (const auto& rr : extract_relation_relations(d, extract(d, cfg), cfg)) {
      ASSERT_GE(rr.support, cfg.min_support);
      ASSERT_EQ(rr.support, rr.witnesses.size());
      ASSERT_EQ(rr.distance > 0, rr.query_type == QueryType::kDistanceJoin);
    }
  }
}

TEST(Names, RoundTripAndReject) {
  for (Operator op : {Operator::kIntersects, Operator::kInside, Operator::kDistanceScan, Operator::kSymmJoin}) {
    EXPECT_EQ(parse_operator(to_string(op)), op);
  }
  for (QueryType qt : kAllQueryTypes) EXPECT_EQ(parse_query_type(to_string(qt)), qt);
  EXPECT_THROW(parse_operator("touches"), std::invalid_argument);
  EXPECT_THROW(parse_query_type("topk"), std::invalid_argument);
}

}  // namespace
}  // namespace sscc
