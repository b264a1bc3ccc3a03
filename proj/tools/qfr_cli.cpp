// Command-line front end: `qfr list` and `qfr run <scenario> ...`.
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error,
// 3 numerical or construction error.

#include "qfr/operator.hpp"
#include "qfr/scenarios.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3 };

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw qfr::Error(qfr::ErrorKind::Config, "cannot write '" + path + "'");
  out << text;
  if (!out) throw qfr::Error(qfr::ErrorKind::Config, "write to '" + path + "' failed");
}

void print_registry() {
  for (const auto& s : qfr::scenario_registry()) {
    std::cout << s.name << "  " << s.summary << "\n";
    for (const auto& p : s.params) std::cout << "    " << p.key << " = " << p.default_value.dump() << "  " << p.doc << "\n";
  }
}

int run(const std::string& scenario, const std::vector<std::string>& params, const std::string& config_path,
        const std::string& out, const std::string& format, const std::optional<long long>& seed) {
  const qfr::Json file = config_path.empty() ? qfr::Json::object() : qfr::load_config_file(config_path);
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& p : params) overrides.push_back(qfr::split_assignment(p));
  qfr::ScenarioConfig cfg = qfr::make_config(scenario, file, overrides, seed);
  if (!format.empty()) cfg.format = qfr::parse_format(format);
  if (!out.empty()) cfg.out_path = out;

  const qfr::ScenarioReport report = qfr::run_scenario(cfg);
  const std::string text = qfr::emit(report, cfg.format);
  if (cfg.out_path) {
    write_file(*cfg.out_path, text);
    // CSV output also gets one plain file per table, e.g. report_deficit_curves.csv.
    if (cfg.format == qfr::ReportFormat::Csv) {
      const std::filesystem::path base(*cfg.out_path);
      for (const auto& [name, table] : report.tables) {
        auto path = base.parent_path() / (base.stem().string() + "_" + name + ".csv");
        write_file(path.string(), qfr::emit_table_csv(table));
      }
    }
  } else {
    std::cout << text;
  }
  return report.passed() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of quantum fluctuation relations"};
  app.require_subcommand(1);

  app.add_subcommand("list", "print the scenario registry with parameter defaults");

  auto* run_cmd = app.add_subcommand("run", "run one scenario and emit its report");
  std::string scenario, config_path, out, format;
  std::vector<std::string> params;
  std::optional<long long> seed;
  run_cmd->add_option("scenario", scenario, "scenario name (may come from --config instead)");
  run_cmd->add_option("--param,-p", params, "parameter override key=value (repeatable)")->take_all();
  run_cmd->add_option("--config,-c", config_path, "JSON config file; flags take precedence");
  run_cmd->add_option("--out,-o", out, "write the report here instead of stdout");
  run_cmd->add_option("--format,-f", format, "json, csv or text");
  run_cmd->add_option("--seed", seed, "seed for scenarios with randomized probes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (app.got_subcommand("list")) {
      print_registry();
      return kPass;
    }
    return run(scenario, params, config_path, out, format, seed);
  } catch (const qfr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == qfr::ErrorKind::Config ? kUsage : kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
