#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheetcheck/regress.hpp"
#include "sheetcheck/testkit.hpp"

// JSON documents read and written by the command-line tool: test suites,
// regression scenarios, correspondence maps, baselines, the append-only
// test log (one JSON object per line) and regression reports.
//
// Values are encoded as JSON numbers, strings and booleans; null is a blank
// cell and {"error": "DIV0"} an error value.

namespace sheetcheck {

/// Document failed schema validation. The message names the source and the
/// JSON path of the offending field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<TestCase> parse_suite(std::string_view json_text, std::string_view source = "<suite>");
std::vector<TestCase> load_suite(const std::filesystem::path& path);

using MapPairs = std::vector<std::pair<std::string, std::string>>;

struct ScenarioFile {
  std::vector<Scenario> scenarios;
  std::vector<std::string> outputs;
  MapPairs map;
};

/// Either {"scenarios": [...], "outputs": [...], "map": [...]} or a single
/// scenario written as {"name", "inputs", "outputs", "map"}.
ScenarioFile parse_scenarios(std::string_view json_text, std::string_view source = "<scenarios>");
ScenarioFile load_scenarios(const std::filesystem::path& path);

/// [{"old": ..., "new": ...}] or {"map": [...]}.
MapPairs parse_map(std::string_view json_text, std::string_view source = "<map>");
MapPairs load_map(const std::filesystem::path& path);

std::string baseline_to_json(const Baseline& baseline);
Baseline parse_baseline(std::string_view json_text, std::string_view source = "<baseline>");
Baseline load_baseline(const std::filesystem::path& path);
void save_baseline(const Baseline& baseline, const std::filesystem::path& path);

/// Single line, no trailing newline.
std::string record_to_json(const TestRecord& record);
TestRecord parse_record(std::string_view json_line, std::string_view source = "<record>");

/// Appends one line per record and flushes after each.
class FileLog : public LogSink {
 public:
  explicit FileLog(std::filesystem::path path);

 protected:
  void write(const TestRecord& record) override;

 private:
  std::filesystem::path path_;
};

/// Blank lines are ignored; any other malformed line is a SchemaError.
std::vector<TestRecord> read_log(const std::filesystem::path& path);

std::string report_to_json(const RegressionReport& report);

}  // namespace sheetcheck
