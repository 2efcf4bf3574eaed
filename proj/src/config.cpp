#include "sscc/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "sscc/io.hpp"
#include "sscc/str_tree.hpp"

namespace sscc {

namespace {

class ValueReader {
 public:
  ValueReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  ConfigValue read_all() {
    ConfigValue v = read();
    skip();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  ConfigValue read() {
    skip();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      std::vector<ConfigValue> items;
      skip();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return {items};
      }
      while (true) {
        items.push_back(read());
        skip();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return {items};
        }
        fail("expected ',' or ']'");
      }
    }
    if (c == '"') {
      ++pos_;
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        s.push_back(text_[pos_++]);
      }
      if (pos_ >= text_.size()) fail("unterminated string");
      ++pos_;
      return {s};
    }
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    double v = 0;
    const char* begin = text_.data() + pos_;
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) fail("expected a value");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return {v};
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double as_number(const std::string& key, const ConfigValue& v) {
  if (const double* d = std::get_if<double>(&v.value)) return *d;
  throw ConfigError("config key '" + key + "' expects a number");
}

std::size_t as_count(const std::string& key, const ConfigValue& v) {
  const double d = as_number(key, v);
  if (d < 0 || d != std::floor(d)) throw ConfigError("config key '" + key + "' expects a non-negative integer");
  return static_cast<std::size_t>(d);
}

std::vector<ConfigValue> as_array(const std::string& key, const ConfigValue& v) {
  if (const auto* a = std::get_if<std::vector<ConfigValue>>(&v.value)) return *a;
  throw ConfigError("config key '" + key + "' expects an array");
}

void check_weight(const char* name, double w) {
  if (!(w >= 0 && w <= 1)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void ExtractionConfig::validate() const {
  if (!(radius_m > 0)) throw ConfigError("radius_m must be positive");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (min_support < 1) throw ConfigError("min_support must be at least 1");
  if (!(distance_grid_m > 0)) throw ConfigError("distance_grid_m must be positive");
  if (node_capacity < 2) throw ConfigError("node_capacity must be at least 2");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

void QualityConfig::validate() const {
  if (!(lambda_m > 0)) throw ConfigError("lambda_m must be positive");
  check_weight("w_distance", w_distance);
  check_weight("w_overlap", w_overlap);
  check_weight("w_type", w_type);
  check_weight("multi_w_avg", multi_w_avg);
  check_weight("multi_w_intersect", multi_w_intersect);
  check_weight("multi_w_distance", multi_w_distance);
  if (std::abs(w_distance + w_overlap + w_type - 1) > 1e-9) {
    throw ConfigError("w_distance + w_overlap + w_type must sum to 1");
  }
  if (std::abs(multi_w_avg + multi_w_intersect + multi_w_distance - 1) > 1e-9) {
    throw ConfigError("multi_weights must sum to 1");
  }
  if (!(threshold >= 0 && threshold <= 1)) throw ConfigError("threshold must lie in [0, 1]");
}

std::map<std::string, ConfigValue> parse_config_text(std::string_view text) {
  std::map<std::string, ConfigValue> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = ValueReader(trim(line.substr(eq + 1)), line_no).read_all();
  }
  return out;
}

void apply_config(const std::map<std::string, ConfigValue>& values, PipelineConfig& cfg) {
  ExtractionConfig& e = cfg.extraction;
  QualityConfig& q = cfg.quality;
  for (const auto& [key, v] : values) {
    if (key == "radius_m") {
      e.radius_m = as_number(key, v);
    } else if (key == "k") {
      e.k = as_count(key, v);
    } else if (key == "min_support") {
      e.min_support = as_count(key, v);
    } else if (key == "distance_grid_m") {
      e.distance_grid_m = as_number(key, v);
    } else if (key == "node_capacity") {
      e.node_capacity = as_count(key, v);
    } else if (key == "jobs") {
      e.jobs = as_count(key, v);
    } else if (key == "reference_tables") {
      e.reference_tables.clear();
      for (const ConfigValue& item : as_array(key, v)) {
        const auto* s = std::get_if<std::string>(&item.value);
        if (!s) throw ConfigError("reference_tables expects strings");
        e.reference_tables.push_back(*s);
      }
    } else if (key == "lambda_m") {
      q.lambda_m = as_number(key, v);
    } else if (key == "w_distance") {
      q.w_distance = as_number(key, v);
    } else if (key == "w_overlap") {
      q.w_overlap = as_number(key, v);
    } else if (key == "w_type") {
      q.w_type = as_number(key, v);
    } else if (key == "threshold") {
      q.threshold = as_number(key, v);
    } else if (key == "multi_weights") {
      const auto items = as_array(key, v);
      if (items.size() != 3) throw ConfigError("multi_weights expects [avg, intersect, distance]");
      q.multi_w_avg = as_number(key, items[0]);
      q.multi_w_intersect = as_number(key, items[1]);
      q.multi_w_distance = as_number(key, items[2]);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  e.validate();
  q.validate();
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  apply_config(parse_config_text(io::read_file(path)), cfg);
  return cfg;
}

nlohmann::json to_json(const ExtractionConfig& c) {
  return {{"radius_m", c.radius_m},
          {"k", c.k},
          {"min_support", c.min_support},
          {"distance_grid_m", c.distance_grid_m},
          {"reference_tables", c.reference_tables},
          {"node_capacity", c.node_capacity}};
}

nlohmann::json to_json(const QualityConfig& c) {
  return {{"lambda_m", c.lambda_m},
          {"w_distance", c.w_distance},
          {"w_overlap", c.w_overlap},
          {"w_type", c.w_type},
          {"threshold", c.threshold},
          {"multi_weights", {c.multi_w_avg, c.multi_w_intersect, c.multi_w_distance}}};
}

ExtractionConfig extraction_config_from_json(const nlohmann::json& j) {
  ExtractionConfig c;
  c.radius_m = j.at("radius_m").get<double>();
  c.k = j.at("k").get<std::size_t>();
  c.min_support = j.at("min_support").get<std::size_t>();
  c.distance_grid_m = j.at("distance_grid_m").get<double>();
  c.reference_tables = j.at("reference_tables").get<std::vector<std::string>>();
  c.node_capacity = j.value("node_capacity", std::size_t{16});
  return c;
}

QualityConfig quality_config_from_json(const nlohmann::json& j) {
  QualityConfig c;
  c.lambda_m = j.at("lambda_m").get<double>();
  c.w_distance = j.at("w_distance").get<double>();
  c.w_overlap = j.at("w_overlap").get<double>();
  c.w_type = j.at("w_type").get<double>();
  c.threshold = j.at("threshold").get<double>();
  const auto& mw = j.at("multi_weights");
  c.multi_w_avg = mw.at(0).get<double>();
  c.multi_w_intersect = mw.at(1).get<double>();
  c.multi_w_distance = mw.at(2).get<double>();
  return c;
}

}  // namespace sscc
