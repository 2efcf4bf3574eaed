#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sscc/config.hpp"
#include "sscc/csv.hpp"
#include "sscc/dataset.hpp"
#include "sscc/evaluator.hpp"
#include "sscc/io.hpp"
#include "sscc/knowledge_base.hpp"
#include "sscc/pipeline.hpp"
#include "sscc/relations.hpp"
#include "sscc/sampler.hpp"
#include "sscc/templates.hpp"

namespace sscc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::size_t jobs = 1;
  std::string config;

  std::string dataset;
  std::string kb_dir;
  std::string corpus;
  std::string output;

  // build-kb overrides
  std::optional<double> radius_m;
  std::optional<std::size_t> k;
  std::optional<std::size_t> min_support;
  std::optional<double> threshold;
  std::string timestamp;

  // generate
  std::size_t n_pairs = 100;
  std::uint64_t seed = 0;
  std::size_t entity_cap = 5;
  std::string templates;

  // validate
  double min_validity = 0;

  // synth
  std::size_t points = 0;
  std::size_t lines = 0;
  std::size_t regions = 0;
  std::size_t tables = 0;
  double extent = 20'000;
  std::string profile;
};

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  if (p.has_filename() == false) p = p.parent_path();
  return p.string() + ".manifest.json";
}

/// Writes the run manifest beside `output`.
void write_manifest(const std::string& command, const json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const fs::path& output,
                    Clock::time_point start, std::size_t items) {
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  json m;
  m["command"] = command;
  m["config"] = config;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["wall_seconds"] = wall;
  m["items"] = items;
  m["throughput_items_per_s"] = wall > 0 ? static_cast<double>(items) / wall : 0.0;
  m["timestamp"] = utc_timestamp();
  io::write_file_atomic(manifest_path(output), m.dump(2) + "\n");
}

Dataset load_checked(const std::string& dir, std::ostream& err) {
  LoadReport report;
  Dataset d = load_dataset(dir, &report);
  for (const auto& w : report.warnings) {
    err << fmt::format("warning: {}:{}: {}\n", w.file, w.line, w.message);
  }
  for (const auto& r : report.rejects) {
    err << fmt::format("rejected: {}:{}: {}\n", r.file, r.line, r.message);
  }
  return d;
}

json stats_json(const DatasetStats& s) {
  return {{"tables", s.n_tables}, {"points", s.n_points}, {"lines", s.n_lines},
          {"regions", s.n_regions}, {"entities", s.n_entities}};
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const Dataset d = load_checked(o.dataset, err);
  const DatasetStats total = dataset_stats(d);
  out << fmt::format("{:<20} {:>6} {:>8}\n", "table", "kind", "entities");
  json tables = json::array();
  for (const Table& t : d.tables()) {
    out << fmt::format("{:<20} {:>6} {:>8}\n", t.name, to_string(t.kind), t.entities.size());
    tables.push_back({{"name", t.name}, {"kind", to_string(t.kind)}, {"entities", t.entities.size()}});
  }
  out << fmt::format("tables {}  points {}  lines {}  regions {}  entities {}\n", total.n_tables,
                     total.n_points, total.n_lines, total.n_regions, total.n_entities);
  if (!o.output.empty()) {
    json j = stats_json(total);
    j["dataset"] = d.name();
    j["per_table"] = tables;
    io::write_file_atomic(o.output, j.dump(2) + "\n");
    write_manifest("stats", json::object(), {o.dataset}, {o.output}, o.output, start, total.n_entities);
  }
  return 0;
}

int cmd_build_kb(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  cfg.extraction.jobs = o.jobs;
  if (o.radius_m) cfg.extraction.radius_m = *o.radius_m;
  if (o.k) cfg.extraction.k = *o.k;
  if (o.min_support) cfg.extraction.min_support = *o.min_support;
  if (o.threshold) cfg.quality.threshold = *o.threshold;

  const Dataset d = load_checked(o.dataset, err);
  BuildResult res = build_knowledge_base(d, cfg, o.timestamp);
  const auto files = save_kb(res.kb, o.output);

  const BuildStats& st = res.stats;
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  out << fmt::format("entity relations: {} candidates, {} retained\n", st.entity_candidates,
                     st.entity_filter.kept);
  out << fmt::format("relation relations: {} candidates, {} retained\n", st.relation_candidates,
                     st.relation_filter.kept);
  out << fmt::format("retained {} relations in {:.2f} s ({:.1f} relations/s)\n", st.retained(), wall,
                     wall > 0 ? static_cast<double>(st.retained()) / wall : 0.0);

  std::vector<std::string> outputs;
  for (const auto& f : files) outputs.push_back(f.string());
  json config{{"extraction", to_json(cfg.extraction)}, {"quality", to_json(cfg.quality)},
              {"jobs", cfg.extraction.jobs}};
  std::vector<std::string> inputs{o.dataset};
  if (!o.config.empty()) inputs.push_back(o.config);
  write_manifest("build-kb", config, inputs, outputs, o.output, start, st.retained());
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const Dataset d = load_checked(o.dataset, err);
  const KnowledgeBase kb = load_kb(o.kb_dir);
  check_kb_against_dataset(kb, d);
  const TemplateLibrary lib = o.templates.empty() ? default_templates() : load_templates(o.templates);
  for (const auto& w : lib.warnings) err << "warning: " << w << "\n";

  SamplerConfig sc;
  sc.n_pairs = o.n_pairs;
  sc.seed = o.seed;
  sc.entity_cap = o.entity_cap;
  const Corpus corpus = generate_corpus(kb, lib, d, sc);
  write_corpus(corpus.pairs, o.output);

  const GenerationReport& rep = corpus.report;
  for (const auto& [qt, n] : rep.per_type) {
    out << fmt::format("{:<14} {:>4} (quota {}, candidates {})\n", to_string(qt), n, rep.quota.at(qt),
                       rep.candidates.at(qt));
  }
  out << fmt::format("generated {} of {} pairs; {} entities reached the cap\n", rep.produced,
                     rep.requested, rep.entities_capped);
  for (const auto& s : rep.shortfall) out << "shortfall: " << s << "\n";

  json config{{"n_pairs", sc.n_pairs}, {"seed", sc.seed}, {"entity_cap", sc.entity_cap},
              {"templates", o.templates.empty() ? "default" : o.templates}};
  std::vector<std::string> inputs{o.dataset, o.kb_dir};
  if (!o.templates.empty()) inputs.push_back(o.templates);
  write_manifest("generate", config, inputs, {o.output}, o.output, start, rep.produced);
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const Dataset d = load_checked(o.dataset, err);
  const StrTree tree = build_dataset_index(d);
  const auto rows = read_corpus(o.corpus);
  std::vector<std::string> exes;
  for (const auto& r : rows) exes.push_back(r.exe);
  const auto verdicts = query::validate_batch(exes, d, tree, o.jobs);

  std::string report = csv::join({"id", "verdict", "stage", "reason", "rows_returned"});
  std::size_t valid = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = verdicts[i];
    if (v.valid) ++valid;
    report += csv::join({rows[i].id, v.valid ? "valid" : "invalid", v.stage, v.reason,
                         std::to_string(v.rows_returned)});
  }
  const std::string report_path = o.output.empty() ? o.corpus + ".validation.csv" : o.output;
  io::write_file_atomic(report_path, report);

  const double pct = rows.empty() ? 0.0 : 100.0 * static_cast<double>(valid) / static_cast<double>(rows.size());
  out << fmt::format("validity {}/{} = {:.2f}%\n", valid, rows.size(), pct);
  json config{{"min_validity", o.min_validity}, {"jobs", o.jobs}};
  write_manifest("validate", config, {o.dataset, o.corpus}, {report_path}, report_path, start, rows.size());
  if (pct < o.min_validity) {
    err << fmt::format("validity {:.2f}% is below the required {:.2f}%\n", pct, o.min_validity);
    return 3;
  }
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
  const auto start = Clock::now();
  SynthSpec spec;
  if (o.profile == "berlin") {
    spec = berlin_profile(o.seed);
  } else if (o.profile == "nanjing") {
    spec = nanjing_profile(o.seed);
  } else if (!o.profile.empty()) {
    throw ConfigError("unknown profile '" + o.profile + "' (berlin or nanjing)");
  } else {
    spec.seed = o.seed;
    spec.n_points = o.points;
    spec.n_lines = o.lines;
    spec.n_regions = o.regions;
    spec.n_tables = o.tables;
    spec.extent = {0, 0, o.extent, o.extent};
  }
  const Dataset d = synthesize_dataset(spec);
  save_dataset(d, o.output);
  const DatasetStats s = dataset_stats(d);
  out << fmt::format("wrote {} entities in {} tables to {}\n", s.n_entities, s.n_tables, o.output);
  json config{{"seed", spec.seed},         {"points", spec.n_points}, {"lines", spec.n_lines},
              {"regions", spec.n_regions}, {"tables", spec.n_tables},
              {"extent", {spec.extent.min_x, spec.extent.min_y, spec.extent.max_x, spec.extent.max_y}}};
  write_manifest("synth", config, {}, {o.output}, o.output, start, s.n_entities);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Spatial corpus construction: knowledge bases and NL/query pairs from vector datasets", "sscc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Print dataset statistics");
  stats->add_option("dataset", o.dataset, "Dataset directory")->required();
  stats->add_option("-o,--output", o.output, "Also write the statistics as JSON");

  auto* build = app.add_subcommand("build-kb", "Extract, score and filter relations into a knowledge base");
  build->add_option("dataset", o.dataset, "Dataset directory")->required();
  build->add_option("-o,--output", o.output, "Knowledge-base directory")->required();
  build->add_option("--config", o.config, "TOML-style config file");
  build->add_option("--radius-m", o.radius_m, "Distance scan radius in meters");
  build->add_option("--k", o.k, "Neighbors per reference table");
  build->add_option("--min-support", o.min_support, "Witness pairs needed for a table-level relation");
  build->add_option("--threshold", o.threshold, "Quality threshold");
  build->add_option("--timestamp", o.timestamp, "Fixed build timestamp for reproducible output");

  auto* gen = app.add_subcommand("generate", "Sample NL/executable query pairs from a knowledge base");
  gen->add_option("dataset", o.dataset, "Dataset directory")->required();
  gen->add_option("kb", o.kb_dir, "Knowledge-base directory")->required();
  gen->add_option("-n,--pairs", o.n_pairs, "Number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", o.output, "Corpus CSV")->required();
  gen->add_option("--seed", o.seed, "Sampling seed");
  gen->add_option("--entity-cap", o.entity_cap, "Maximum pairs per entity")->check(CLI::PositiveNumber);
  gen->add_option("--templates", o.templates, "Template JSON file (default: shipped library)");

  auto* val = app.add_subcommand("validate", "Execute every query of a corpus against its dataset");
  val->add_option("dataset", o.dataset, "Dataset directory")->required();
  val->add_option("corpus", o.corpus, "Corpus CSV")->required();
  val->add_option("--min-validity", o.min_validity, "Fail below this validity percentage")
      ->check(CLI::Range(0.0, 100.0));
  val->add_option("-o,--output", o.output, "Validation report CSV (default: <corpus>.validation.csv)");

  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic dataset");
  synth->add_option("-o,--output", o.output, "Dataset directory")->required();
  synth->add_option("--points", o.points, "Point entities");
  synth->add_option("--lines", o.lines, "Line entities");
  synth->add_option("--regions", o.regions, "Region entities");
  synth->add_option("--tables", o.tables, "Table count (0: one per kind)");
  synth->add_option("--extent", o.extent, "Side length of the square extent in meters");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--profile", o.profile, "berlin or nanjing cardinalities");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (stats->parsed()) return cmd_stats(o, out, err);
    if (build->parsed()) return cmd_build_kb(o, out, err);
    if (gen->parsed()) return cmd_generate(o, out, err);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (synth->parsed()) return cmd_synth(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sscc::cli
