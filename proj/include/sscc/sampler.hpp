#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sscc/dataset.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/templates.hpp"

namespace sscc {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerConfig {
  std::size_t n_pairs = 100;
  std::size_t entity_cap = 5;
  std::uint64_t seed = 0;
  /// Missing types weigh 1.
  std::map<QueryType, double> type_weights;

  void validate() const;
};

struct GenerationReport {
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::map<QueryType, std::size_t> quota;
  std::map<QueryType, std::size_t> per_type;
  std::map<QueryType, std::size_t> candidates;
  /// Entities that reached the cap and blocked at least one candidate.
  std::size_t entities_capped = 0;
  std::vector<std::string> shortfall;
};

struct Corpus {
  std::vector<QueryPair> pairs;
  GenerationReport report;
};

/// Balanced, entity-capped, seeded sample of instantiated templates.
/// Throws SamplerError("nothing to generate") for an empty knowledge base or library.
Corpus generate_corpus(const KnowledgeBase& kb, const TemplateLibrary& lib, const Dataset& d,
                       const SamplerConfig& cfg);

struct CorpusRow {
  std::string id;
  std::string query_type;
  std::string template_id;
  std::string nl;
  std::string exe;
  std::string provenance;
};

/// Corpus CSV text: id,query_type,template_id,nl,exe,provenance.
std::string corpus_csv(const std::vector<QueryPair>& pairs);
void write_corpus(const std::vector<QueryPair>& pairs, const std::filesystem::path& path);
std::vector<CorpusRow> read_corpus(const std::filesystem::path& path);

}  // namespace sscc
