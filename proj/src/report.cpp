#include "qfr/report.hpp"

#include "qfr/operator.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace qfr {

namespace {

const char* relation_name(Check::Relation r) { return r == Check::Relation::AtMost ? "<=" : ">="; }

Check::Relation parse_relation(const std::string& s) {
  if (s == "<=") return Check::Relation::AtMost;
  if (s == ">=") return Check::Relation::AtLeast;
  throw Error(ErrorKind::Config, "unknown check relation '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string short_fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void finite_or_throw(const std::string& what, double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::Numerical, "report entry '" + what + "' is not finite");
}

void check_json_finite(const std::string& path, const Json& j) {
  if (j.is_number_float()) finite_or_throw(path, j.get<double>());
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) check_json_finite(path + "." + it.key(), it.value());
  if (j.is_array())
    for (std::size_t k = 0; k < j.size(); ++k) check_json_finite(path + "[" + std::to_string(k) + "]", j[k]);
}

}  // namespace

bool ScenarioReport::passed() const {
  for (const Check& c : checks)
    if (!c.pass()) return false;
  return true;
}

void ScenarioReport::require_finite() const {
  check_json_finite("parameters", parameters);
  for (const auto& [name, v] : values) finite_or_throw(name, v);
  for (const Check& c : checks) {
    finite_or_throw(c.name, c.value);
    finite_or_throw(c.name + " tolerance", c.tolerance);
  }
  for (const auto& [name, t] : tables)
    for (const auto& row : t.rows)
      for (double v : row) finite_or_throw("table " + name, v);
  finite_or_throw("seconds", seconds);
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "text") return ReportFormat::Text;
  throw Error(ErrorKind::Config, "unknown output format '" + name + "' (expected json, csv or text)");
}

Json to_json(const ScenarioReport& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["passed"] = r.passed();
  j["parameters"] = r.parameters;
  Json values = Json::object();
  for (const auto& [name, v] : r.values) values[name] = v;
  j["values"] = values;
  Json checks = Json::array();
  for (const Check& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"relation", relation_name(c.relation)},
                      {"pass", c.pass()}});
  j["checks"] = checks;
  Json tables = Json::object();
  for (const auto& [name, t] : r.tables) tables[name] = {{"columns", t.columns}, {"rows", t.rows}};
  j["tables"] = tables;
  j["seconds"] = r.seconds;
  return j;
}

ScenarioReport report_from_json(const Json& j) {
  try {
    ScenarioReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.parameters = j.at("parameters");
    for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it)
      r.values.emplace_back(it.key(), it.value().get<double>());
    for (const Json& c : j.at("checks"))
      r.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                          c.at("tolerance").get<double>(), parse_relation(c.at("relation").get<std::string>())});
    for (auto it = j.at("tables").begin(); it != j.at("tables").end(); ++it)
      r.tables[it.key()] = {it.value().at("columns").get<std::vector<std::string>>(),
                            it.value().at("rows").get<std::vector<std::vector<double>>>()};
    r.seconds = j.at("seconds").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed report: ") + e.what());
  }
}

std::string emit_json(const ScenarioReport& r) {
  r.require_finite();
  return to_json(r).dump(2) + "\n";
}

std::string emit_table_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string emit_csv(const ScenarioReport& r) {
  r.require_finite();
  std::ostringstream os;
  os << "kind,name,value,tolerance,relation,verdict\n";
  for (const auto& [name, v] : r.values) os << "value," << name << "," << fmt(v) << ",,,\n";
  for (const Check& c : r.checks)
    os << "check," << c.name << "," << fmt(c.value) << "," << fmt(c.tolerance) << "," << relation_name(c.relation)
       << "," << (c.pass() ? "PASS" : "FAIL") << "\n";
  for (const auto& [name, t] : r.tables) os << "\n# table " << name << "\n" << emit_table_csv(t);
  return os.str();
}

std::string emit_text(const ScenarioReport& r) {
  r.require_finite();
  std::ostringstream os;
  os << "scenario " << r.scenario << "  (" << short_fmt(r.seconds) << " s)\n";
  for (const auto& [name, v] : r.values) os << "  " << std::left << std::setw(28) << name << short_fmt(v) << "\n";
  for (const Check& c : r.checks)
    os << (c.pass() ? "PASS " : "FAIL ") << c.name << ": " << short_fmt(c.value) << " " << relation_name(c.relation)
       << " " << short_fmt(c.tolerance) << "\n";
  for (const auto& [name, t] : r.tables) os << "  table " << name << ": " << t.rows.size() << " rows\n";
  os << (r.passed() ? "overall PASS" : "overall FAIL") << "\n";
  return os.str();
}

std::string emit(const ScenarioReport& r, ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return emit_json(r);
    case ReportFormat::Csv: return emit_csv(r);
    case ReportFormat::Text: return emit_text(r);
  }
  return emit_json(r);
}

}  // namespace qfr
