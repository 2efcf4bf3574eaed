#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <unistd.h>

#include "sscc/io.hpp"
#include "sscc/knowledge_base.hpp"

namespace sscc {
namespace {

namespace fs = std::filesystem;

class KbDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sscc_kb_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::size_t data_rows(const std::string& file) const {
    const std::string text = io::read_file(dir_ / file);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
  }

  fs::path dir_;
};

EntityRelation er(EntityId s, EntityId o, Operator op, double d, double score) {
  return {s, o, op, d, GeometryKind::kPoint, GeometryKind::kRegion, score};
}

RelationRelation rr(QueryType qt, std::string r1, std::string r2, double d, std::size_t support, double score) {
  RelationRelation r;
  r.query_type = qt;
  r.relation1 = std::move(r1);
  r.relation2 = std::move(r2);
  r.relation2_type = GeometryKind::kLine;
  r.distance = d;
  r.op = qt == QueryType::kDistanceJoin ? Operator::kDistanceScan : Operator::kSymmJoin;
  r.support = support;
  r.score = score;
  return r;
}

KnowledgeBase one_of_each() {
  KnowledgeBase kb;
  kb.source_dataset = "toy";
  kb.meta.timestamp = "2024-01-01T00:00:00Z";
  kb.entity_relations = {er(1, 2, Operator::kIntersects, 0, 0.9), er(1, 2, Operator::kInside, 0, 0.95),
                         er(3, 2, Operator::kDistanceScan, 120.5, 0.7)};
  kb.relation_relations = {rr(QueryType::kSpatialJoin, "A", "B", 0, 4, 0.8)};
  kb.meta.counts = {{"entity_relations", 3}, {"relation_relations", 1}};
  return kb;
}

KnowledgeBase random_kb(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  KnowledgeBase kb;
  kb.source_dataset = "rand";
  kb.meta.timestamp = "t" + std::to_string(rng() % 1000);
  kb.meta.quality.threshold = 0.5;
  for (int i = 0, n = static_cast<int>(rng() % 30); i < n; ++i) {
    const Operator op = static_cast<Operator>(rng() % 3);
    const double d = op == Operator::kDistanceScan ? u(rng) * 5000 : 0;
    kb.entity_relations.push_back(er(i + 1, i + 1000, op, d, 0.5 + 0.5 * u(rng) + 1e-6));
  }
  for (int i = 0, n = static_cast<int>(rng() % 10); i < n; ++i) {
    const QueryType qt = kAllQueryTypes[2 + rng() % 3];
    kb.relation_relations.push_back(rr(qt, "T" + std::to_string(i), "U", qt == QueryType::kDistanceJoin ? 500 : 0,
                                       1 + rng() % 50, 0.5 + 0.5 * u(rng) + 1e-6));
  }
  for (auto& r : kb.entity_relations) r.score = std::min(r.score, 1.0);
  for (auto& r : kb.relation_relations) r.score = std::min(r.score, 1.0);
  normalize(kb);
  return kb;
}

TEST_F(KbDir, RoundTripAndByteStableResave) {
  const KnowledgeBase kb = one_of_each();
  save_kb(kb, dir_);
  const KnowledgeBase back = load_kb(dir_);
  EXPECT_EQ(back, kb);
  const std::string first = io::read_file(dir_ / "entity_relations.csv");
  save_kb(back, dir_);
  EXPECT_EQ(io::read_file(dir_ / "entity_relations.csv"), first);
}

TEST_F(KbDir, RandomizedRoundTrips) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const KnowledgeBase kb = random_kb(rng);
    save_kb(kb, dir_);
    ASSERT_EQ(load_kb(dir_), kb) << trial;
  }
}

TEST_F(KbDir, EmptyKbWritesHeaderOnlyFiles) {
  const auto files = save_kb(KnowledgeBase{}, dir_);
  EXPECT_EQ(files.size(), 3u);
  EXPECT_EQ(io::read_file(dir_ / "entity_relations.csv"),
            "subject,object,operator,subject_kind,object_kind,distance_m,score\n");
  EXPECT_EQ(io::read_file(dir_ / "relation_relations.csv"),
            "query_type,relation1,relation2,relation1_type,relation2_type,distance_m,operator,support,score\n");
  EXPECT_TRUE(fs::exists(dir_ / "kb_meta.json"));
  EXPECT_EQ(load_kb(dir_), KnowledgeBase{});
}

TEST_F(KbDir, OneFactPerOperatorGivesFourRows) {
  save_kb(one_of_each(), dir_);
  EXPECT_EQ(data_rows("entity_relations.csv") + data_rows("relation_relations.csv"), 4u);
}

TEST_F(KbDir, MissingMetaIsAnError) {
  save_kb(one_of_each(), dir_);
  fs::remove(dir_ / "kb_meta.json");
  EXPECT_THROW(load_kb(dir_), KbError);
}

TEST_F(KbDir, UnknownOperatorNamesTheRow) {
  save_kb(KnowledgeBase{}, dir_);
  io::write_file_atomic(dir_ / "entity_relations.csv",
                        "subject,object,operator,subject_kind,object_kind,distance_m,score\n"
                        "1,2,intersects,point,region,0.000,0.900000\n"
                        "1,3,touches,point,region,0.000,0.900000\n");
  try {
    load_kb(dir_);
    FAIL();
  } catch (const KbError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("touches"), std::string::npos) << msg;
  }
}

TEST_F(KbDir, WrongColumnNamesTheColumn) {
  save_kb(KnowledgeBase{}, dir_);
  io::write_file_atomic(dir_ / "entity_relations.csv",
                        "subject,object,op,subject_kind,object_kind,distance_m,score\n");
  try {
    load_kb(dir_);
    FAIL();
  } catch (const KbError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'op'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("schema v1"), std::string::npos) << msg;
  }
}

TEST_F(KbDir, HandWrittenTwoRowFile) {
  save_kb(KnowledgeBase{}, dir_);
  io::write_file_atomic(dir_ / "entity_relations.csv",
                        "subject,object,operator,subject_kind,object_kind,distance_m,score\n"
                        "5,7,distancescan,point,point,250.000,0.710000\n"
                        "4,9,inside,point,region,0.000,0.990000\n");
  const KnowledgeBase kb = load_kb(dir_);
  ASSERT_EQ(kb.entity_relations.size(), 2u);
  EXPECT_EQ(kb.entity_relations[0].subject, 4);
  EXPECT_EQ(kb.entity_relations[0].op, Operator::kInside);
  EXPECT_EQ(kb.entity_relations[1].distance, 250.0);
}

TEST_F(KbDir, ScoreAtOrBelowThresholdIsRejected) {
  save_kb(KnowledgeBase{}, dir_);
  io::write_file_atomic(dir_ / "entity_relations.csv",
                        "subject,object,operator,subject_kind,object_kind,distance_m,score\n"
                        "5,7,distancescan,point,point,250.000,0.600000\n");
  EXPECT_THROW(load_kb(dir_), KbError);
}

TEST(Select, ByOperatorSortedByScore) {
  KnowledgeBase kb;
  kb.entity_relations = {er(1, 9, Operator::kInside, 0, 0.7), er(2, 9, Operator::kInside, 0, 0.9),
                         er(3, 9, Operator::kInside, 0, 0.8), er(1, 8, Operator::kDistanceScan, 40, 0.95)};
  RelationQuery q;
  q.op = Operator::kInside;
  const auto got = select_entity_relations(kb, q);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].subject, 2);
  EXPECT_EQ(got[1].subject, 3);
  EXPECT_EQ(got[2].subject, 1);
}

TEST(Select, MaxDistanceZeroAndEmptyConstraints) {
  const KnowledgeBase kb = one_of_each();
  RelationQuery q;
  q.max_distance = 0;
  for (const auto& r : select_entity_relations(kb, q)) EXPECT_NE(r.op, Operator::kDistanceScan);
  EXPECT_EQ(select_entity_relations(kb, q).size(), 2u);
  EXPECT_EQ(select_entity_relations(kb, {}).size(), 3u);
  EXPECT_EQ(select_relation_relations(kb, {}).size(), 1u);
  RelationQuery contradictory;
  contradictory.op = Operator::kInside;
  contradictory.min_score = 2;
  EXPECT_TRUE(select_entity_relations(kb, contradictory).empty());
}

TEST(Select, ConjunctionEqualsSequentialFiltering) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    const KnowledgeBase kb = random_kb(rng);
    RelationQuery a, b;
    a.op = static_cast<Operator>(rng() % 3);
    b.min_score = 0.5 + (rng() % 50) / 100.0;
    b.max_distance = static_cast<double>(rng() % 3000);
    RelationQuery both = b;
    both.op = a.op;
    KnowledgeBase stage = kb;
    stage.entity_relations = select_entity_relations(kb, a);
    auto seq = select_entity_relations(stage, b);
    const auto all = select_entity_relations(kb, both);
    ASSERT_EQ(seq, all);
    ASSERT_LE(all.size(), kb.entity_relations.size());
  }
}

}  // namespace
}  // namespace sscc
