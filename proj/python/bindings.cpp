#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sscc/dataset.hpp"
#include "sscc/evaluator.hpp"
#include "sscc/geometry.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/pipeline.hpp"
#include "sscc/query.hpp"
#include "sscc/relations.hpp"
#include "sscc/sampler.hpp"
#include "sscc/templates.hpp"
#include "sscc/wkt.hpp"

namespace py = pybind11;
using namespace sscc;

namespace {

py::dict stats_dict(const DatasetStats& s) {
  py::dict d;
  d["tables"] = s.n_tables;
  d["points"] = s.n_points;
  d["lines"] = s.n_lines;
  d["regions"] = s.n_regions;
  d["entities"] = s.n_entities;
  return d;
}

py::dict verdict_dict(const query::Verdict& v) {
  py::dict d;
  d["valid"] = v.valid;
  d["stage"] = v.stage;
  d["reason"] = v.reason;
  d["rows_returned"] = v.rows_returned;
  return d;
}

SynthSpec make_spec(const std::string& profile, std::size_t points, std::size_t lines,
                    std::size_t regions, std::size_t tables, double extent, std::uint64_t seed) {
  if (profile == "berlin") return berlin_profile(seed);
  if (profile == "nanjing") return nanjing_profile(seed);
  if (!profile.empty()) throw ConfigError("unknown profile '" + profile + "'");
  SynthSpec s;
  s.seed = seed;
  s.n_points = points;
  s.n_lines = lines;
  s.n_regions = regions;
  s.n_tables = tables;
  s.extent = {0, 0, extent, extent};
  return s;
}

/// Dataset plus the index the evaluator needs, built once.
struct IndexedDataset {
  explicit IndexedDataset(Dataset d) : dataset(std::move(d)), tree(build_dataset_index(dataset)) {}
  Dataset dataset;
  StrTree tree;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatial corpus construction: relation extraction, knowledge bases and query pairs";

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<WktError>(m, "WktError", PyExc_ValueError);
  py::register_exception<DatasetError>(m, "DatasetError", PyExc_ValueError);
  py::register_exception<KbError>(m, "KbError", PyExc_ValueError);
  py::register_exception<query::QueryError>(m, "QueryError", PyExc_ValueError);
  py::register_exception<SamplerError>(m, "SamplerError", PyExc_ValueError);

  m.def("distance", [](const std::string& a, const std::string& b) {
    return distance(geometry_from_wkt(a), geometry_from_wkt(b));
  }, py::arg("a"), py::arg("b"), "Minimum distance between two WKT geometries.");
  m.def("intersects", [](const std::string& a, const std::string& b) {
    return intersects(geometry_from_wkt(a), geometry_from_wkt(b));
  }, py::arg("a"), py::arg("b"));
  m.def("inside", [](const std::string& a, const std::string& b) {
    return inside(geometry_from_wkt(a), geometry_from_wkt(b));
  }, py::arg("a"), py::arg("b"));
  m.def("overlap_ratio", [](const std::string& a, const std::string& b) {
    return overlap_ratio(geometry_from_wkt(a), geometry_from_wkt(b));
  }, py::arg("a"), py::arg("b"));

  py::class_<IndexedDataset>(m, "Dataset")
      .def_property_readonly("name", [](const IndexedDataset& d) { return d.dataset.name(); })
      .def_property_readonly("tables", [](const IndexedDataset& d) {
        std::vector<std::string> names;
        for (const Table& t : d.dataset.tables()) names.push_back(t.name);
        return names;
      })
      .def("stats", [](const IndexedDataset& d) { return stats_dict(dataset_stats(d.dataset)); })
      .def("save", [](const IndexedDataset& d, const std::filesystem::path& dir) { save_dataset(d.dataset, dir); })
      .def("__len__", [](const IndexedDataset& d) { return d.dataset.entity_count(); });

  m.def("load_dataset", [](const std::filesystem::path& dir) {
    return std::make_unique<IndexedDataset>(load_dataset(dir));
  }, py::arg("path"));
  m.def("synthesize", [](const std::string& profile, std::size_t points, std::size_t lines,
                         std::size_t regions, std::size_t tables, double extent, std::uint64_t seed) {
    return std::make_unique<IndexedDataset>(
        synthesize_dataset(make_spec(profile, points, lines, regions, tables, extent, seed)));
  }, py::arg("profile") = "", py::arg("points") = 0, py::arg("lines") = 0, py::arg("regions") = 0,
     py::arg("tables") = 0, py::arg("extent") = 20'000.0, py::arg("seed") = 0);

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def_property_readonly("entity_relation_count", [](const KnowledgeBase& kb) { return kb.entity_relations.size(); })
      .def_property_readonly("relation_relation_count", [](const KnowledgeBase& kb) { return kb.relation_relations.size(); })
      .def_property_readonly("source_dataset", [](const KnowledgeBase& kb) { return kb.source_dataset; })
      .def("save", [](const KnowledgeBase& kb, const std::filesystem::path& dir) {
        std::vector<std::string> out;
        for (const auto& p : save_kb(kb, dir)) out.push_back(p.string());
        return out;
      })
      .def("__eq__", [](const KnowledgeBase& a, const KnowledgeBase& b) { return a == b; });

  m.def("load_kb", &load_kb, py::arg("path"));
  m.def("build_kb", [](const IndexedDataset& d, std::size_t jobs, const std::string& timestamp) {
    PipelineConfig cfg;
    cfg.extraction.jobs = jobs;
    py::gil_scoped_release release;
    return build_knowledge_base(d.dataset, cfg, timestamp).kb;
  }, py::arg("dataset"), py::arg("jobs") = 1, py::arg("timestamp") = "");

  m.def("generate", [](const KnowledgeBase& kb, const IndexedDataset& d, std::size_t n_pairs,
                       std::uint64_t seed, std::size_t entity_cap) {
    SamplerConfig sc;
    sc.n_pairs = n_pairs;
    sc.seed = seed;
    sc.entity_cap = entity_cap;
    const Corpus c = generate_corpus(kb, default_templates(), d.dataset, sc);
    py::list out;
    for (const QueryPair& p : c.pairs) {
      py::dict row;
      row["query_type"] = std::string(to_string(p.query_type));
      row["template_id"] = p.template_id;
      row["nl"] = p.nl;
      row["exe"] = p.exe;
      row["provenance"] = p.provenance;
      out.append(row);
    }
    return out;
  }, py::arg("kb"), py::arg("dataset"), py::arg("n_pairs") = 100, py::arg("seed") = 0,
     py::arg("entity_cap") = 5);

  m.def("parse_query", [](const std::string& text) { return query::print_query(query::parse_query(text)); },
        py::arg("text"), "Parses a query and returns its canonical text.");
  m.def("validate_query", [](const IndexedDataset& d, const std::string& exe) {
    return verdict_dict(query::validate_query(exe, d.dataset, d.tree));
  }, py::arg("dataset"), py::arg("exe"));
}
