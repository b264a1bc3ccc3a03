#pragma once

#include "qfr/report.hpp"

#include <functional>
#include <optional>

namespace qfr {

struct ParamSpec {
  std::string key;
  Json default_value;  // the type of the default fixes the accepted type
  std::string doc;
};

struct ScenarioSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<void(const Json& params, ScenarioReport& report)> run;
};

const std::vector<ScenarioSpec>& scenario_registry();
const ScenarioSpec& find_scenario(const std::string& name);  // throws Config

struct ScenarioConfig {
  std::string scenario;
  Json params = Json::object();  // complete: defaults merged with overrides
  std::optional<std::string> out_path;
  ReportFormat format = ReportFormat::Json;
};

// Precedence: defaults, then the config file, then --param overrides, then --seed.
// `file` holds {"scenario", "params", "format", "out", "seed"}, every key optional.
ScenarioConfig make_config(const std::string& scenario, const Json& file,
                           const std::vector<std::pair<std::string, std::string>>& overrides,
                           std::optional<long long> seed = std::nullopt);
// Reads and parses a JSON config file; throws Config on I/O or syntax errors.
Json load_config_file(const std::string& path);

// "k=v" -> (k, v); throws Config on a missing '='.
std::pair<std::string, std::string> split_assignment(const std::string& text);

ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace qfr
