#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sscc {

struct ExtractionConfig {
  double radius_m = 5000;
  std::size_t k = 5;
  std::size_t min_support = 3;
  double distance_grid_m = 500;
  /// Tables whose entities may serve as reference objects; empty means all.
  std::vector<std::string> reference_tables;
  std::size_t node_capacity = 16;
  /// Worker threads for extraction and scoring. Output does not depend on it.
  std::size_t jobs = 1;

  void validate() const;
};

struct QualityConfig {
  double lambda_m = 1000;
  double w_distance = 0.5;
  double w_overlap = 0.3;
  double w_type = 0.2;
  double threshold = 0.6;
  double multi_w_avg = 0.4;
  double multi_w_intersect = 0.3;
  double multi_w_distance = 0.3;

  void validate() const;
};

struct PipelineConfig {
  ExtractionConfig extraction;
  QualityConfig quality;
};

/// One value from a key = value config file.
struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<ConfigValue>> value;
};

/// Parses the TOML-style subset: `key = value` lines, `#` comments, `[section]`
/// headers (ignored for lookup), numbers, booleans, quoted strings and flat arrays.
/// Throws ConfigError naming the line on malformed input.
std::map<std::string, ConfigValue> parse_config_text(std::string_view text);

/// Applies recognised keys onto `cfg`; unknown keys raise ConfigError.
void apply_config(const std::map<std::string, ConfigValue>& values, PipelineConfig& cfg);

PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExtractionConfig& c);
nlohmann::json to_json(const QualityConfig& c);
ExtractionConfig extraction_config_from_json(const nlohmann::json& j);
QualityConfig quality_config_from_json(const nlohmann::json& j);

}  // namespace sscc
