#include "sscc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "sscc/csv.hpp"
#include "sscc/io.hpp"

namespace sscc {

void SamplerConfig::validate() const {
  if (n_pairs < 1) throw SamplerError("n_pairs must be at least 1");
  if (entity_cap < 1) throw SamplerError("entity_cap must be at least 1");
  for (const auto& [qt, w] : type_weights) {
    if (!(w > 0) || !std::isfinite(w)) {
      throw SamplerError(fmt::format("weight for {} must be positive", to_string(qt)));
    }
  }
}

namespace {

struct Candidate {
  const Template* tmpl = nullptr;
  Binding binding;
};

/// Unbiased draw in [0, n) so shuffles do not depend on the standard library's distributions.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

class TypePool {
 public:
  TypePool(std::map<std::string, std::vector<Candidate>> combos, std::mt19937_64& rng) {
    for (auto& [name, cands] : combos) {
      shuffle(cands, rng);
      lanes_.push_back({std::move(cands), 0});
    }
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const Lane& l : lanes_) n += l.cands.size();
    return n;
  }

  bool live() const { return !lanes_.empty(); }

  /// Next candidate accepted by `take`, rotating across geometry combinations.
  template <typename F>
  bool next(F&& take) {
    while (!lanes_.empty()) {
      if (turn_ >= lanes_.size()) turn_ = 0;
      Lane& lane = lanes_[turn_];
      while (lane.cursor < lane.cands.size()) {
        if (take(lane.cands[lane.cursor++])) {
          ++turn_;
          return true;
        }
      }
      lanes_.erase(lanes_.begin() + static_cast<std::ptrdiff_t>(turn_));
    }
    return false;
  }

 private:
  struct Lane {
    std::vector<Candidate> cands;
    std::size_t cursor = 0;
  };
  std::vector<Lane> lanes_;
  std::size_t turn_ = 0;
};

void check_emittable(const QueryPair& p) {
  if (has_placeholder(p.nl) || has_placeholder(p.exe)) {
    throw std::logic_error("unsubstituted placeholder in pair from " + p.template_id);
  }
  if (p.provenance.empty()) throw std::logic_error("pair without provenance from " + p.template_id);
}

}  // namespace

Corpus generate_corpus(const KnowledgeBase& kb, const TemplateLibrary& lib, const Dataset& d,
                       const SamplerConfig& cfg) {
  cfg.validate();
  if ((kb.entity_relations.empty() && kb.relation_relations.empty()) || lib.templates.empty()) {
    throw SamplerError("nothing to generate");
  }

  Corpus corpus;
  GenerationReport& rep = corpus.report;
  rep.requested = cfg.n_pairs;

  std::map<QueryType, TypePool> pools;
  for (std::size_t ti = 0; ti < std::size(kAllQueryTypes); ++ti) {
    const QueryType qt = kAllQueryTypes[ti];
    std::map<std::string, std::vector<Candidate>> combos;
    for (const Template& t : lib.templates) {
      if (t.query_type != qt) continue;
      for (Binding& b : match_candidates(t, kb, d)) {
        std::string combo = b.combo;
        combos[combo].push_back({&t, std::move(b)});
      }
    }
    std::mt19937_64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (ti + 1)));
    TypePool pool(std::move(combos), rng);
    rep.candidates[qt] = pool.size();
    if (pool.live()) pools.emplace(qt, std::move(pool));
  }
  if (pools.empty()) throw SamplerError("nothing to generate");

  double total_weight = 0;
  for (const auto& [qt, _] : pools) {
    const auto it = cfg.type_weights.find(qt);
    total_weight += it == cfg.type_weights.end() ? 1.0 : it->second;
  }
  std::size_t assigned = 0;
  for (const auto& [qt, _] : pools) {
    const auto it = cfg.type_weights.find(qt);
    const double w = it == cfg.type_weights.end() ? 1.0 : it->second;
    rep.quota[qt] = static_cast<std::size_t>(std::floor(static_cast<double>(cfg.n_pairs) * w / total_weight));
    assigned += rep.quota[qt];
  }
  for (auto it = pools.begin(); assigned < cfg.n_pairs; ++it, ++assigned) {
    if (it == pools.end()) it = pools.begin();
    ++rep.quota[it->first];
  }

  std::unordered_map<EntityId, std::size_t> uses;
  std::unordered_set<EntityId> capped;
  std::set<std::string> emitted;
  std::map<QueryType, std::vector<QueryPair>> chosen;

  const auto take = [&](QueryType qt, const Candidate& c) {
    std::vector<EntityId> ents = c.binding.entities;
    std::sort(ents.begin(), ents.end());
    ents.erase(std::unique(ents.begin(), ents.end()), ents.end());
    bool blocked = false;
    for (EntityId e : ents) {
      if (uses[e] >= cfg.entity_cap) {
        capped.insert(e);
        blocked = true;
      }
    }
    if (blocked) return false;
    QueryPair p = instantiate(*c.tmpl, c.binding, d);
    if (!emitted.insert(p.exe).second) return false;
    check_emittable(p);
    for (EntityId e : ents) ++uses[e];
    chosen[qt].push_back(std::move(p));
    return true;
  };

  for (auto& [qt, pool] : pools) {
    const QueryType type = qt;
    while (chosen[type].size() < rep.quota[type] &&
           pool.next([&](const Candidate& c) { return take(type, c); })) {
    }
    if (chosen[type].size() < rep.quota[type]) {
      rep.shortfall.push_back(fmt::format("{}: quota {}, produced {} (candidates exhausted or entity-capped)",
                                          to_string(type), rep.quota[type], chosen[type].size()));
    }
  }

  std::size_t produced = 0;
  for (const auto& [qt, v] : chosen) produced += v.size();
  bool progress = true;
  while (produced < cfg.n_pairs && progress) {
    progress = false;
    for (auto& [qt, pool] : pools) {
      if (produced >= cfg.n_pairs) break;
      const QueryType type = qt;
      if (pool.next([&](const Candidate& c) { return take(type, c); })) {
        ++produced;
        progress = true;
      }
    }
  }
  if (produced < cfg.n_pairs) {
    rep.shortfall.push_back(fmt::format("requested {} pairs, only {} feasible", cfg.n_pairs, produced));
  }

  for (QueryType qt : kAllQueryTypes) {
    auto it = chosen.find(qt);
    if (it == chosen.end()) {
      if (!pools.contains(qt)) rep.shortfall.push_back(fmt::format("{}: no matching templates or relations", to_string(qt)));
      continue;
    }
    rep.per_type[qt] = it->second.size();
    for (QueryPair& p : it->second) corpus.pairs.push_back(std::move(p));
  }
  rep.produced = corpus.pairs.size();
  rep.entities_capped = capped.size();
  return corpus;
}

std::string corpus_csv(const std::vector<QueryPair>& pairs) {
  std::string out = csv::join({"id", "query_type", "template_id", "nl", "exe", "provenance"});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const QueryPair& p = pairs[i];
    out += csv::join({fmt::format("q{:04d}", i + 1), std::string(to_string(p.query_type)), p.template_id,
                      p.nl, p.exe, p.provenance});
  }
  return out;
}

void write_corpus(const std::vector<QueryPair>& pairs, const std::filesystem::path& path) {
  io::write_file_atomic(path, corpus_csv(pairs));
}

std::vector<CorpusRow> read_corpus(const std::filesystem::path& path) {
  const auto records = csv::parse(io::read_file(path));
  const std::vector<std::string> header{"id", "query_type", "template_id", "nl", "exe", "provenance"};
  if (records.empty() || records.front().fields != header) {
    throw csv::CsvError(path.string() + ": expected header id,query_type,template_id,nl,exe,provenance");
  }
  std::vector<CorpusRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != header.size()) {
      throw csv::CsvError(fmt::format("{} line {}: expected {} fields, found {}", path.string(),
                                      records[i].line, header.size(), f.size()));
    }
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5]});
  }
  return rows;
}

}  // namespace sscc
