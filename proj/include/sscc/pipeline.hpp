#pragma once

#include <string>

#include "sscc/config.hpp"
#include "sscc/dataset.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/quality.hpp"

namespace sscc {

struct BuildStats {
  std::size_t entity_candidates = 0;
  std::size_t relation_candidates = 0;
  FilterReport entity_filter;
  FilterReport relation_filter;
  double index_seconds = 0;
  double extract_seconds = 0;
  double score_seconds = 0;
  double total_seconds = 0;

  std::size_t retained() const { return entity_filter.kept + relation_filter.kept; }
};

struct BuildResult {
  KnowledgeBase kb;
  BuildStats stats;
};

/// Index, extract, score and filter: the whole knowledge-base construction.
/// `timestamp` goes into the build metadata verbatim; empty means the current UTC time.
BuildResult build_knowledge_base(const Dataset& d, const PipelineConfig& cfg,
                                 std::string timestamp = {});

/// Current UTC time as 2024-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace sscc
