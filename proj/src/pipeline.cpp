#include "sscc/pipeline.hpp"

#include <chrono>
#include <ctime>

#include <fmt/format.h>

#include "parallel.hpp"
#include "sscc/relations.hpp"

namespace sscc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BuildResult build_knowledge_base(const Dataset& d, const PipelineConfig& cfg, std::string timestamp) {
  cfg.extraction.validate();
  cfg.quality.validate();
  if (d.entity_count() == 0) throw DatasetError("dataset contains no entities");

  BuildResult res;
  BuildStats& st = res.stats;
  const auto t0 = Clock::now();

  const StrTree tree = build_dataset_index(d, cfg.extraction.node_capacity);
  st.index_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  std::vector<EntityRelation> facts = extract_entity_relations(d, tree, cfg.extraction);
  st.extract_seconds = seconds_since(t1);
  st.entity_candidates = facts.size();

  t1 = Clock::now();
  detail::parallel_chunks(facts.size(), cfg.extraction.jobs,
                          [&](std::size_t begin, std::size_t end, std::size_t) {
                            for (std::size_t i = begin; i < end; ++i) {
                              facts[i].score = score_entity_relation(facts[i], d, cfg.quality);
                            }
                          });

  // Round to the persisted precision before filtering so a reload sees the same scores.
  KnowledgeBase& kb = res.kb;
  kb.entity_relations = std::move(facts);
  normalize(kb);
  kb.entity_relations = filter_by_threshold(kb.entity_relations, cfg.quality, &st.entity_filter);

  std::vector<RelationRelation> rrs = extract_relation_relations(d, kb.entity_relations, cfg.extraction);
  st.relation_candidates = rrs.size();
  for (RelationRelation& rr : rrs) rr.score = score_relation_relation(rr, rr.witnesses, cfg.quality);
  kb.relation_relations = std::move(rrs);
  normalize(kb);
  kb.relation_relations = filter_by_threshold(kb.relation_relations, cfg.quality, &st.relation_filter);
  st.score_seconds = seconds_since(t1);

  kb.source_dataset = d.name();
  kb.meta.timestamp = timestamp.empty() ? utc_timestamp() : std::move(timestamp);
  kb.meta.extraction = cfg.extraction;
  kb.meta.quality = cfg.quality;
  kb.meta.counts = {
      {"entities", d.entity_count()},
      {"entity_relation_candidates", st.entity_candidates},
      {"entity_relations", st.entity_filter.kept},
      {"entity_relations_rejected", st.entity_filter.rejected},
      {"entity_rejected_by_operator", st.entity_filter.rejected_by_operator},
      {"relation_relation_candidates", st.relation_candidates},
      {"relation_relations", st.relation_filter.kept},
      {"relation_relations_rejected", st.relation_filter.rejected},
  };
  st.total_seconds = seconds_since(t0);
  return res;
}

}  // namespace sscc
