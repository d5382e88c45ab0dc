#include "sheetcheck/documents.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "sheetcheck/formula.hpp"
#include "sheetcheck/textio.hpp"

namespace sheetcheck {

using json = nlohmann::json;

namespace {

// Walks a parsed document, tracking the JSON path for error messages.
class Node {
 public:
  Node(const json& j, std::string source, std::string path)
      : j_(&j), source_(std::move(source)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw SchemaError(source_ + ": " + (path_.empty() ? "document" : path_) + ": " + message);
  }

  const json& raw() const { return *j_; }
  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  Node at(const char* key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) fail(std::string("missing field '") + key + "'");
    return Node(*it, source_, path_ + "." + key);
  }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) {
      out.emplace_back((*j_)[i], source_, path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::vector<std::pair<std::string, Node>> members() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      out.emplace_back(it.key(), Node(it.value(), source_, path_ + "." + it.key()));
    }
    return out;
  }

  void only_keys(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (ok.count(it.key()) == 0) fail("unknown field '" + it.key() + "'");
    }
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  double num() const {
    if (!j_->is_number()) fail("expected a number");
    double x = j_->get<double>();
    if (!std::isfinite(x)) fail("number is not finite");
    return x;
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const Node& n : items()) out.push_back(n.str());
    return out;
  }

 private:
  const json* j_;
  std::string source_;
  std::string path_;
};

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(source) + ": invalid JSON: " + e.what());
  }
}

json value_to_json(const Value& v) {
  if (v.is_number()) return v.as_number();
  if (v.is_text()) return v.as_text();
  if (v.is_bool()) return v.as_bool();
  if (v.is_error()) return json{{"error", std::string(error_name(v.as_error()))}};
  return nullptr;
}

Value value_from(const Node& n) {
  const json& j = n.raw();
  if (j.is_null()) return Value::blank();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_string()) return Value::text(j.get<std::string>());
  if (j.is_number()) return Value::number(n.num());
  if (j.is_object()) {
    n.only_keys({"error"});
    std::string code = n.at("error").str();
    auto kind = parse_error_name(code);
    if (!kind) kind = parse_error_code(code);
    if (!kind) n.fail("unknown error kind '" + code + "'");
    return Value::error(*kind);
  }
  n.fail("expected a value");
}

std::vector<Value> values_from(const Node& n) {
  std::vector<Value> out;
  for (const Node& item : n.items()) out.push_back(value_from(item));
  return out;
}

json tolerance_to_json(const Tolerance& t) { return json{{"atol", t.atol}, {"rtol", t.rtol}}; }

Tolerance tolerance_from(const Node& n) {
  n.only_keys({"atol", "rtol"});
  Tolerance t;
  if (n.has("atol")) t.atol = n.at("atol").num();
  if (n.has("rtol")) t.rtol = n.at("rtol").num();
  if (t.atol < 0 || t.rtol < 0) n.fail("tolerances must be non-negative");
  return t;
}

SubstitutionMode mode_from(const Node& n) {
  std::string m = n.str();
  if (sheet_key(m) != "DIRECT") n.fail("unsupported substitution mode '" + m + "'");
  return SubstitutionMode::Direct;
}

json substitution_to_json(const SubstitutionSpec& s) {
  return json{{"target", s.target}, {"mode", "Direct"}, {"value", value_to_json(s.value)}};
}

SubstitutionSpec substitution_from(const Node& n) {
  n.only_keys({"target", "mode", "value"});
  SubstitutionSpec s;
  s.target = n.at("target").str();
  if (n.has("mode")) s.mode = mode_from(n.at("mode"));
  s.value = value_from(n.at("value"));
  return s;
}

Condition condition_from(const Node& n, const Tolerance& default_tol) {
  try {
    if (n.is_string()) return parse_condition(n.str(), default_tol);
    n.only_keys({"lhs", "comparator", "rhs", "tolerance"});
    Condition c;
    c.lhs = n.at("lhs").str();
    c.rhs = n.at("rhs").str();
    std::string op = n.at("comparator").str();
    auto cmp = parse_comparator(op);
    if (!cmp) n.fail("unknown comparator '" + op + "'");
    c.comparator = *cmp;
    c.tolerance = n.has("tolerance") ? tolerance_from(n.at("tolerance")) : default_tol;
    // Validates both sides; the parsed trees are discarded.
    parse_formula(c.lhs, "Sheet1");
    parse_formula(c.rhs, "Sheet1");
    return c;
  } catch (const FormulaError& e) {
    n.fail(std::string("bad condition: ") + e.what());
  }
}

TestCase test_from(const Node& n) {
  TestCase t;
  t.id = n.at("id").str();
  if (n.has("description")) t.description = n.at("description").str();
  const std::string kind = n.at("kind").str();
  if (kind == "invariant") {
    n.only_keys({"id", "description", "kind", "cell", "pass_text"});
    InvariantTest inv;
    inv.cell = n.at("cell").str();
    if (n.has("pass_text")) inv.pass_text = n.at("pass_text").str();
    t.kind = std::move(inv);
  } else if (kind == "table") {
    n.only_keys({"id", "description", "kind", "inputs", "row_values", "col_values", "outputs", "expected",
                 "tolerance"});
    TableTest tab;
    tab.inputs = n.at("inputs").strings();
    tab.row_values = values_from(n.at("row_values"));
    if (n.has("col_values")) tab.col_values = values_from(n.at("col_values"));
    tab.outputs = n.at("outputs").strings();
    for (const Node& row : n.at("expected").items()) tab.expected.push_back(values_from(row));
    if (n.has("tolerance")) tab.tolerance = tolerance_from(n.at("tolerance"));
    t.kind = std::move(tab);
  } else if (kind == "substitution") {
    n.only_keys({"id", "description", "kind", "substitutions", "conditions", "tolerance"});
    SubstitutionTest sub;
    Tolerance tol = n.has("tolerance") ? tolerance_from(n.at("tolerance")) : Tolerance{};
    for (const Node& s : n.at("substitutions").items()) sub.substitutions.push_back(substitution_from(s));
    for (const Node& c : n.at("conditions").items()) sub.conditions.push_back(condition_from(c, tol));
    t.kind = std::move(sub);
  } else {
    n.at("kind").fail("unknown test kind '" + kind + "'");
  }
  return t;
}

std::string source_of(const std::filesystem::path& path) { return path.string(); }

}  // namespace

// ---------------------------------------------------------------------------

std::vector<TestCase> parse_suite(std::string_view json_text, std::string_view source) {
  const json doc = parse_json(json_text, source);
  Node root(doc, std::string(source), "");
  Node list = root;
  if (root.is_object()) {
    root.only_keys({"tests"});
    list = root.at("tests");
  }
  std::vector<TestCase> suite;
  for (const Node& item : list.items()) suite.push_back(test_from(item));
  try {
    validate_suite(suite);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string(source) + ": " + e.what());
  }
  return suite;
}

std::vector<TestCase> load_suite(const std::filesystem::path& path) {
  return parse_suite(read_file(path), source_of(path));
}

namespace {

MapPairs map_from(const Node& n) {
  MapPairs out;
  for (const Node& item : n.items()) {
    item.only_keys({"old", "new"});
    out.emplace_back(item.at("old").str(), item.at("new").str());
  }
  return out;
}

Scenario scenario_from(const Node& n) {
  Scenario s;
  s.name = n.at("name").str();
  for (const Node& in : n.at("inputs").items()) {
    in.only_keys({"target", "value"});
    s.inputs.push_back(ScenarioInput{in.at("target").str(), value_from(in.at("value"))});
  }
  return s;
}

}  // namespace

ScenarioFile parse_scenarios(std::string_view json_text, std::string_view source) {
  const json doc = parse_json(json_text, source);
  Node root(doc, std::string(source), "");
  ScenarioFile file;
  if (root.has("scenarios")) {
    root.only_keys({"scenarios", "outputs", "map"});
    for (const Node& s : root.at("scenarios").items()) {
      s.only_keys({"name", "inputs"});
      file.scenarios.push_back(scenario_from(s));
    }
  } else {
    root.only_keys({"name", "inputs", "outputs", "map"});
    file.scenarios.push_back(scenario_from(root));
  }
  file.outputs = root.at("outputs").strings();
  if (file.outputs.empty()) root.at("outputs").fail("at least one output is required");
  if (root.has("map")) file.map = map_from(root.at("map"));
  std::set<std::string> seen;
  for (const Scenario& s : file.scenarios) {
    if (!seen.insert(s.name).second) root.fail("duplicate scenario '" + s.name + "'");
  }
  return file;
}

ScenarioFile load_scenarios(const std::filesystem::path& path) {
  return parse_scenarios(read_file(path), source_of(path));
}

MapPairs parse_map(std::string_view json_text, std::string_view source) {
  const json doc = parse_json(json_text, source);
  Node root(doc, std::string(source), "");
  if (root.is_object()) {
    root.only_keys({"map"});
    return map_from(root.at("map"));
  }
  return map_from(root);
}

MapPairs load_map(const std::filesystem::path& path) { return parse_map(read_file(path), source_of(path)); }

// ---------------------------------------------------------------------------

std::string baseline_to_json(const Baseline& baseline) {
  json scenarios = json::object();
  for (const auto& [name, values] : baseline.scenarios) {
    json cells = json::object();
    for (const auto& [addr, value] : values) cells[format_address(addr)] = value_to_json(value);
    scenarios[name] = std::move(cells);
  }
  json doc{{"fingerprint", baseline.fingerprint},
           {"recorded_at", baseline.recorded_at},
           {"scenarios", std::move(scenarios)}};
  return doc.dump(2) + "\n";
}

Baseline parse_baseline(std::string_view json_text, std::string_view source) {
  const json doc = parse_json(json_text, source);
  Node root(doc, std::string(source), "");
  root.only_keys({"fingerprint", "recorded_at", "scenarios"});
  Baseline b;
  b.fingerprint = root.at("fingerprint").str();
  b.recorded_at = root.at("recorded_at").str();
  for (const auto& [name, cells] : root.at("scenarios").members()) {
    ValueMap& values = b.scenarios[name];
    for (const auto& [addr_text, value] : cells.members()) {
      CellAddress addr;
      try {
        addr = parse_address(addr_text, "");
      } catch (const AddressError& e) {
        value.fail(std::string("bad address: ") + e.what());
      }
      if (addr.sheet.empty()) value.fail("address needs a sheet name");
      addr.row_absolute = addr.col_absolute = false;
      values.emplace(addr, value_from(value));
    }
  }
  return b;
}

Baseline load_baseline(const std::filesystem::path& path) {
  return parse_baseline(read_file(path), source_of(path));
}

void save_baseline(const Baseline& baseline, const std::filesystem::path& path) {
  write_file(path, baseline_to_json(baseline));
}

// ---------------------------------------------------------------------------

std::string record_to_json(const TestRecord& r) {
  json subs = json::array();
  for (const SubstitutionSpec& s : r.substitutions) subs.push_back(substitution_to_json(s));
  json details = json::array();
  for (const ConditionDetail& d : r.details) {
    details.push_back(json{{"condition", d.condition},
                           {"value1", value_to_json(d.value1)},
                           {"value2", value_to_json(d.value2)},
                           {"outcome", std::string(outcome_text(d.outcome))}});
  }
  json doc{{"id", r.id},
           {"description", r.description},
           {"kind", r.kind},
           {"status", std::string(status_text(r.status))},
           {"run_at", r.run_at},
           {"fingerprint", r.fingerprint},
           {"substitutions", std::move(subs)},
           {"details", std::move(details)}};
  if (!r.message.empty()) doc["message"] = r.message;
  return doc.dump();
}

TestRecord parse_record(std::string_view json_line, std::string_view source) {
  const json doc = parse_json(json_line, source);
  Node root(doc, std::string(source), "");
  root.only_keys({"id", "description", "kind", "status", "run_at", "fingerprint", "substitutions", "details",
                  "message"});
  TestRecord r;
  r.id = root.at("id").str();
  if (root.has("description")) r.description = root.at("description").str();
  if (root.has("kind")) r.kind = root.at("kind").str();
  const std::string status = root.at("status").str();
  auto st = parse_status(status);
  if (!st) root.at("status").fail("unknown status '" + status + "'");
  r.status = *st;
  r.run_at = root.at("run_at").str();
  r.fingerprint = root.at("fingerprint").str();
  if (root.has("substitutions")) {
    for (const Node& s : root.at("substitutions").items()) r.substitutions.push_back(substitution_from(s));
  }
  for (const Node& d : root.at("details").items()) {
    d.only_keys({"condition", "value1", "value2", "outcome"});
    ConditionDetail detail;
    detail.condition = d.at("condition").str();
    detail.value1 = value_from(d.at("value1"));
    detail.value2 = value_from(d.at("value2"));
    const std::string outcome = d.at("outcome").str();
    auto o = parse_outcome(outcome);
    if (!o) d.at("outcome").fail("unknown outcome '" + outcome + "'");
    detail.outcome = *o;
    r.details.push_back(std::move(detail));
  }
  if (root.has("message")) r.message = root.at("message").str();
  return r;
}

FileLog::FileLog(std::filesystem::path path) : path_(std::move(path)) {}

void FileLog::write(const TestRecord& record) {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open log " + path_.string());
  const std::string line = record_to_json(record) + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw std::runtime_error("cannot append to log " + path_.string());
}

std::vector<TestRecord> read_log(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<TestRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    records.push_back(parse_record(line, path.string() + ":" + std::to_string(line_no)));
  }
  return records;
}

// ---------------------------------------------------------------------------

std::string report_to_json(const RegressionReport& report) {
  json scenarios = json::array();
  for (const ScenarioResult& s : report.scenarios) {
    json cells = json::array();
    for (const CellComparison& c : s.cells) {
      cells.push_back(json{{"old", format_address(c.old_address)},
                           {"new", format_address(c.new_address)},
                           {"old_value", value_to_json(c.old_value)},
                           {"new_value", value_to_json(c.new_value)},
                           {"passed", c.passed}});
    }
    scenarios.push_back(json{{"name", s.name}, {"passed", s.passed}, {"cells", std::move(cells)}});
  }
  json doc{{"status", std::string(regression_label(report.status))},
           {"tolerance", tolerance_to_json(report.tolerance)},
           {"started_at", report.started_at},
           {"finished_at", report.finished_at},
           {"reference_fingerprint", report.reference_fingerprint},
           {"candidate_fingerprint", report.candidate_fingerprint},
           {"cells", report.cell_count()},
           {"mismatches", report.mismatch_count()},
           {"scenarios", std::move(scenarios)}};
  if (!report.error.empty()) doc["error"] = report.error;
  return doc.dump(2) + "\n";
}

}  // namespace sheetcheck
