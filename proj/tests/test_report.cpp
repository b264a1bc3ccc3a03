#include "doctest.h"

#include "qfr/operator.hpp"
#include "qfr/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace qfr;

namespace {

ScenarioReport sample_report() {
  ScenarioReport r;
  r.scenario = "two_qubit";
  r.parameters = {{"theta", 0.7}, {"samples", 3}, {"flag", true}, {"scheme", "fd5"}};
  r.value("p_plus", 0.1 + 0.2);  // not exactly representable in short decimal form
  r.value("tiny", 1.234567890123456e-17);
  r.at_most("residual", 3e-13, 1e-12);
  r.at_least("broken", 0.5, 1e-3);
  r.tables["deficit_curves"] = {{"r", "deficit_i", "deficit_f", "deficit_local"},
                                {{-1.0, 1e-9, 2e-3, 1e-9}, {1.0, 4e-3, 3e-9, 3e-9}}};
  r.seconds = 0.125;
  return r;
}

int count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("JSON round trip") {
  const ScenarioReport r = sample_report();
  const ScenarioReport back = report_from_json(Json::parse(emit_json(r)));
  CHECK(back == r);
  CHECK(back.values[0].second == 0.1 + 0.2);
  const Json j = to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["checks"][0]["relation"] == "<=");
  CHECK_THROWS_AS(report_from_json(Json::parse("{\"scenario\": \"x\"}")), Error);
}

TEST_CASE("verdicts follow the tolerance comparisons") {
  ScenarioReport r = sample_report();
  CHECK(r.passed());
  r.at_most("too_big", 2.0, 1.0);
  CHECK_FALSE(r.passed());
  ScenarioReport s;
  s.at_least("probe", 1e-4, 1e-3);
  CHECK_FALSE(s.passed());
}

TEST_CASE("CSV and text emitters") {
  const ScenarioReport r = sample_report();
  const std::string csv = emit_csv(r);
  CHECK(csv.rfind("kind,name,value,tolerance,relation,verdict\n", 0) == 0);
  CHECK(csv.find("# table deficit_curves\nr,deficit_i,deficit_f,deficit_local\n") != std::string::npos);
  CHECK(emit_table_csv(r.tables.at("deficit_curves")).rfind("r,deficit_i,deficit_f,deficit_local\n", 0) == 0);
  CHECK(count_lines_starting(csv, "check,") == 2);

  const std::string text = emit_text(r);
  CHECK(count_lines_starting(text, "PASS ") + count_lines_starting(text, "FAIL ") == 2);
  CHECK(text.find("overall PASS") != std::string::npos);
}

TEST_CASE("non-finite numbers are rejected") {
  ScenarioReport r = sample_report();
  r.value("bad", std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(emit_json(r), Error);
  ScenarioReport t = sample_report();
  t.tables["deficit_curves"].rows[0][1] = std::numeric_limits<double>::infinity();
  try {
    emit_csv(t);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
  }
}

TEST_CASE("configuration parsing and precedence") {
  SUBCASE("defaults") {
    const ScenarioConfig c = make_config("two_qubit", Json::object(), {});
    CHECK(c.params["theta"] == 0.7);
    CHECK(c.params["beta"] == 1.0);
    CHECK(c.format == ReportFormat::Json);
  }
  SUBCASE("every scenario has defaults for all of its parameters") {
    CHECK(scenario_registry().size() == 12);
    for (const auto& s : scenario_registry()) {
      const ScenarioConfig c = make_config(s.name, Json::object(), {});
      CHECK(c.params.size() == s.params.size());
    }
  }
  SUBCASE("file, then flags, then seed") {
    const Json file = {{"params", {{"seed", 4}, {"beta", 0.5}, {"samples", 2}}}, {"format", "csv"}};
    const ScenarioConfig c = make_config("ladder_crooks", file, {{"beta", "0.25"}}, 9);
    CHECK(c.params["beta"] == 0.25);
    CHECK(c.params["samples"] == 2);
    CHECK(c.params["seed"] == 9);
    CHECK(c.format == ReportFormat::Csv);
  }
  SUBCASE("scenario taken from the file") {
    const ScenarioConfig c = make_config("", Json{{"scenario", "violation"}}, {});
    CHECK(c.scenario == "violation");
  }
  SUBCASE("errors are configuration errors") {
    auto config_error = [](auto&& f) {
      try {
        f();
      } catch (const Error& e) {
        return e.kind() == ErrorKind::Config;
      }
      return false;
    };
    CHECK(config_error([] { make_config("no_such", Json::object(), {}); }));
    CHECK(config_error([] { make_config("two_qubit", Json::object(), {{"nope", "1"}}); }));
    CHECK(config_error([] { make_config("two_qubit", Json::object(), {{"theta", "0.7x"}}); }));
    CHECK(config_error([] { make_config("violation", Json::object(), {{"k_max", "2.5"}}); }));
    CHECK(config_error([] { make_config("violation", Json{{"params", {{"k_max", "3"}}}}, {}); }));
    CHECK(config_error([] { make_config("two_qubit", Json{{"colour", 1}}, {}); }));
    CHECK(config_error([] { split_assignment("theta"); }));
    CHECK(config_error([] { parse_format("xml"); }));
    CHECK(config_error([] { load_config_file("/nonexistent/config.json"); }));
  }
  SUBCASE("config file on disk") {
    const std::string path = "test_report_config.json";
    std::ofstream(path) << R"({"scenario": "two_qubit", "params": {"theta": 0.3}, "format": "text"})";
    const ScenarioConfig c = make_config("", load_config_file(path), {});
    CHECK(c.params["theta"] == 0.3);
    CHECK(c.format == ReportFormat::Text);
    std::remove(path.c_str());
  }
}

TEST_CASE("scenario runs are deterministic") {
  for (const char* name : {"two_qubit", "conditional_ladder", "detailed_balance", "violation"}) {
    const ScenarioConfig c = make_config(name, Json::object(), {});
    ScenarioReport a = run_scenario(c), b = run_scenario(c);
    a.seconds = b.seconds = 0.0;
    CHECK(a == b);
    CHECK(a.passed());
    CHECK(a.parameters == c.params);
  }
  ScenarioConfig bad = make_config("particle_h3", Json::object(), {{"n_points", "70"}});
  try {
    run_scenario(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}
