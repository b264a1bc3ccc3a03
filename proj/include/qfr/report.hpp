#pragma once

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace qfr {

using Json = nlohmann::ordered_json;

// A named quantity compared against a tolerance: value <= tolerance, or value >=
// tolerance for probes that are expected to exceed it.
struct Check {
  enum class Relation { AtMost, AtLeast };
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::AtMost;

  bool pass() const { return relation == Relation::AtMost ? value <= tolerance : value >= tolerance; }
  bool operator==(const Check&) const = default;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool operator==(const Table&) const = default;
};

struct ScenarioReport {
  std::string scenario;
  Json parameters = Json::object();
  std::vector<std::pair<std::string, double>> values;  // insertion order is kept
  std::vector<Check> checks;
  std::map<std::string, Table> tables;
  double seconds = 0.0;

  void value(const std::string& name, double v) { values.emplace_back(name, v); }
  void at_most(const std::string& name, double v, double tol) { checks.push_back({name, v, tol, Check::Relation::AtMost}); }
  void at_least(const std::string& name, double v, double tol) {
    checks.push_back({name, v, tol, Check::Relation::AtLeast});
  }
  bool passed() const;
  // Throws Numerical when any stored number is NaN or infinite.
  void require_finite() const;

  bool operator==(const ScenarioReport&) const = default;
};

enum class ReportFormat { Json, Csv, Text };
ReportFormat parse_format(const std::string& name);

Json to_json(const ScenarioReport& r);
ScenarioReport report_from_json(const Json& j);

std::string emit_json(const ScenarioReport& r);
// Values and checks as kind,name,value,tolerance,relation,verdict rows, followed by every
// table under a "# table <name>" marker.
std::string emit_csv(const ScenarioReport& r);
std::string emit_table_csv(const Table& t);
std::string emit_text(const ScenarioReport& r);
std::string emit(const ScenarioReport& r, ReportFormat f);

}  // namespace qfr
