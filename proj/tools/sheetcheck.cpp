// Command-line front end: runs test suites, invariant checks and regression
// comparisons against workbook text files, and emits probe fragments.
//
// Exit codes: 0 success, 1 test or comparison failure, 2 usage error,
// 3 file, parse or schema error.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sheetcheck/documents.hpp"
#include "sheetcheck/engine.hpp"
#include "sheetcheck/probegen.hpp"
#include "sheetcheck/regress.hpp"
#include "sheetcheck/testkit.hpp"
#include "sheetcheck/textio.hpp"

namespace sc = sheetcheck;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kFileError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes every record to the file log (when given) and keeps a copy for
// printing details afterwards.
class TeeLog : public sc::LogSink {
 public:
  explicit TeeLog(sc::LogSink* file) : file_(file) {}
  const std::vector<sc::TestRecord>& records() const { return records_; }

 protected:
  void write(const sc::TestRecord& r) override {
    if (file_ != nullptr) file_->append(r);
    records_.push_back(r);
  }

 private:
  sc::LogSink* file_;
  std::vector<sc::TestRecord> records_;
};

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string show(const sc::Value& v) {
  if (v.is_blank()) return "(blank)";
  if (v.is_text()) return sc::format_literal(v);
  return sc::display_text(v);
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += i + 1 == row.size() ? row[i] : pad(row[i], widths[i] + 2);
    }
    std::cout << line << "\n";
  }
}

void print_summary(const sc::SuiteSummary& s, const std::string& fingerprint_for_staleness = {}) {
  std::cout << "Last run at: " << (s.last_run_at.empty() ? "never" : s.last_run_at) << "\n"
            << "Number of tests run: " << s.tests_run << "\n"
            << "Number passed: " << s.passed << "\n"
            << "Number failed: " << s.failed << "\n"
            << "Number errored: " << s.errored << "\n";
  if (s.tests.empty()) return;
  std::cout << "\n";
  std::vector<std::vector<std::string>> rows{{"ID", "DESCRIPTION", "STATUS", "RUN AT"}};
  if (!fingerprint_for_staleness.empty()) rows[0].push_back("UP TO DATE");
  for (const sc::SummaryEntry& e : s.tests) {
    rows.push_back({e.id, e.description, std::string(sc::status_text(e.status)), e.run_at});
    if (!fingerprint_for_staleness.empty()) {
      rows.back().push_back(e.fingerprint == fingerprint_for_staleness ? "yes" : "no (stale)");
    }
  }
  print_table(rows);
}

void print_details(const sc::TestRecord& r) {
  std::cout << "\n" << r.id << " [" << sc::status_text(r.status) << "]";
  if (!r.description.empty()) std::cout << " " << r.description;
  std::cout << "\n";
  for (const sc::SubstitutionSpec& s : r.substitutions) {
    std::cout << "  set " << s.target << " <- " << show(s.value) << "\n";
  }
  for (const sc::ConditionDetail& d : r.details) {
    std::cout << "  " << d.condition << ": " << show(d.value1) << " | " << show(d.value2) << " | "
              << sc::outcome_text(d.outcome) << "\n";
  }
  if (!r.message.empty()) std::cout << "  " << r.message << "\n";
}

sc::Tolerance parse_tolerance(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--tol expects ATOL,RTOL");
  auto number = [&](std::string_view part) {
    double x = 0;
    auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
    if (ec != std::errc() || end != part.data() + part.size() || !(x >= 0)) {
      throw UsageError("bad tolerance '" + std::string(part) + "'");
    }
    return x;
  };
  std::string_view all(text);
  return sc::Tolerance{number(all.substr(0, comma)), number(all.substr(comma + 1))};
}

std::vector<sc::RangeRef> resolve_outputs(const sc::Workbook& wb, const std::vector<std::string>& outputs) {
  std::vector<sc::RangeRef> out;
  for (const std::string& o : outputs) out.push_back(sc::resolve_target(wb, o));
  return out;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& wb_path, const std::string& suite_path, const std::string& log_path) {
  sc::LoadedWorkbook loaded = sc::load_workbook(wb_path);
  std::vector<sc::TestCase> tests;
  if (suite_path.empty()) {
    tests = sc::discover_invariants(loaded.workbook);
  } else {
    for (sc::TestCase& t : sc::load_suite(suite_path)) {
      if (std::holds_alternative<sc::InvariantTest>(t.kind)) tests.push_back(std::move(t));
    }
  }
  std::optional<sc::FileLog> file;
  if (!log_path.empty()) file.emplace(log_path);
  TeeLog log(file ? &*file : nullptr);
  sc::RunOptions opts;
  opts.fingerprint = loaded.fingerprint;
  sc::SuiteSummary summary = sc::run_suite(loaded.workbook, tests, log, opts);
  for (const sc::TestRecord& r : log.records()) {
    std::cout << pad(std::string(sc::status_text(r.status)), 8) << r.id;
    if (!r.details.empty()) std::cout << " = " << show(r.details.front().value1);
    if (!r.message.empty()) std::cout << " (" << r.message << ")";
    std::cout << "\n";
  }
  std::cout << summary.passed << " of " << summary.tests_run << " invariants passed\n";
  return summary.all_passed() ? kOk : kFailed;
}

int cmd_test(const std::string& wb_path, const std::string& suite_path, const std::string& log_path) {
  sc::LoadedWorkbook loaded = sc::load_workbook(wb_path);
  std::vector<sc::TestCase> suite = sc::load_suite(suite_path);
  std::optional<sc::FileLog> file;
  if (!log_path.empty()) file.emplace(log_path);
  TeeLog log(file ? &*file : nullptr);
  sc::RunOptions opts;
  opts.fingerprint = loaded.fingerprint;
  sc::SuiteSummary summary = sc::run_suite(loaded.workbook, suite, log, opts);
  std::cout << "Workbook: " << wb_path << " (" << loaded.fingerprint << ")\n";
  print_summary(summary);
  for (const sc::TestRecord& r : log.records()) {
    if (r.status != sc::TestStatus::Passed) print_details(r);
  }
  return summary.all_passed() ? kOk : kFailed;
}

int print_report(const sc::RegressionReport& report, bool as_json) {
  if (as_json) {
    std::cout << sc::report_to_json(report);
  } else {
    std::cout << "Reference: " << report.reference_fingerprint << "\n"
              << "Candidate: " << report.candidate_fingerprint << "\n"
              << "Tolerance: atol=" << sc::format_number(report.tolerance.atol)
              << " rtol=" << sc::format_number(report.tolerance.rtol) << "\n"
              << "Started: " << report.started_at << "  Finished: " << report.finished_at << "\n";
    for (const sc::ScenarioResult& s : report.scenarios) {
      std::size_t bad = static_cast<std::size_t>(
          std::count_if(s.cells.begin(), s.cells.end(), [](const auto& c) { return !c.passed; }));
      std::cout << "\nScenario " << s.name << ": "
                << (s.passed ? "matches reference" : "differs from reference") << " (" << s.cells.size()
                << " cells, " << bad << " differ)\n";
      for (const sc::CellComparison& c : s.cells) {
        if (c.passed) continue;
        std::cout << "  " << sc::format_address(c.old_address);
        if (!sc::same_location(c.old_address, c.new_address)) {
          std::cout << " -> " << sc::format_address(c.new_address);
        }
        std::cout << ": reference " << show(c.old_value) << ", candidate " << show(c.new_value) << "\n";
      }
    }
    std::cout << "\nResult: " << sc::regression_label(report.status);
    if (report.status == sc::RegressionStatus::Error) {
      std::cout << ": " << report.error;
    } else {
      std::cout << " (" << report.mismatch_count() << " of " << report.cell_count() << " cells differ)";
    }
    std::cout << "\n";
  }
  switch (report.status) {
    case sc::RegressionStatus::Matches: return kOk;
    case sc::RegressionStatus::Differs: return kFailed;
    case sc::RegressionStatus::Error: return kFileError;
  }
  return kFileError;
}

int cmd_regress(const std::vector<std::string>& books, const std::string& scenarios_path,
                const std::string& map_path, const std::string& tol_text, const std::string& baseline_path,
                bool as_json) {
  const sc::Tolerance tol = tol_text.empty() ? sc::Tolerance{} : parse_tolerance(tol_text);
  if (!baseline_path.empty() && books.size() != 1) {
    throw UsageError("regress --baseline takes exactly one workbook");
  }
  if (baseline_path.empty() && books.size() != 2) throw UsageError("regress takes OLD and NEW workbooks");

  sc::ScenarioFile scenarios = sc::load_scenarios(scenarios_path);
  sc::MapPairs pairs = scenarios.map;
  if (!map_path.empty()) {
    sc::MapPairs extra = sc::load_map(map_path);
    pairs.insert(pairs.end(), extra.begin(), extra.end());
  }

  if (!baseline_path.empty()) {
    sc::LoadedWorkbook wb = sc::load_workbook(books[0]);
    sc::Baseline baseline = sc::load_baseline(baseline_path);
    sc::CorrespondenceMap map = sc::make_correspondence(wb.workbook, wb.workbook, pairs);
    sc::RegressOptions opts;
    opts.candidate_fingerprint = wb.fingerprint;
    return print_report(sc::compare_to_baseline(wb.workbook, baseline, scenarios.scenarios, map, tol, opts), as_json);
  }

  sc::LoadedWorkbook old_wb = sc::load_workbook(books[0]);
  sc::LoadedWorkbook new_wb = sc::load_workbook(books[1]);
  sc::CorrespondenceMap map = sc::make_correspondence(old_wb.workbook, new_wb.workbook, pairs);
  sc::RegressOptions opts;
  opts.reference_fingerprint = old_wb.fingerprint;
  opts.candidate_fingerprint = new_wb.fingerprint;
  return print_report(sc::run_regression(old_wb.workbook, new_wb.workbook, scenarios.scenarios,
                                         resolve_outputs(old_wb.workbook, scenarios.outputs), map, tol, opts),
                      as_json);
}

int cmd_baseline(const std::string& wb_path, const std::string& scenarios_path, const std::string& out_path) {
  sc::LoadedWorkbook wb = sc::load_workbook(wb_path);
  sc::ScenarioFile scenarios = sc::load_scenarios(scenarios_path);
  sc::RegressOptions opts;
  opts.reference_fingerprint = wb.fingerprint;
  sc::Baseline baseline =
      sc::record_baseline(wb.workbook, scenarios.scenarios, resolve_outputs(wb.workbook, scenarios.outputs), opts);
  sc::save_baseline(baseline, out_path);
  std::size_t cells = baseline.scenarios.empty() ? 0 : baseline.scenarios.begin()->second.size();
  std::cout << "Recorded " << baseline.scenarios.size() << " scenarios x " << cells << " cells to " << out_path
            << "\n";
  return kOk;
}

sc::CellAddress parse_anchor(const std::string& text) {
  try {
    return sc::parse_address(text, "");
  } catch (const sc::AddressError& e) {
    throw UsageError(std::string("bad --at address: ") + e.what());
  }
}

void print_fragment(const sc::CellAddress& anchor, const std::string& lines) {
  if (!anchor.sheet.empty()) std::cout << "[sheet " << anchor.sheet << "]\n";
  std::cout << lines;
}

int cmd_probe_sentinels(const std::string& dims, bool extended, const std::string& at) {
  const auto x = dims.find_first_of("xX");
  int rows = 0;
  int cols = 0;
  auto parse = [](std::string_view s, int& out) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
  };
  if (x == std::string::npos || !parse(std::string_view(dims).substr(0, x), rows) ||
      !parse(std::string_view(dims).substr(x + 1), cols)) {
    throw UsageError("sentinel size must look like 3x3");
  }
  try {
    print_fragment(parse_anchor(at), sc::sentinel_fragment(sc::lookup_sentinels(rows, cols, extended), parse_anchor(at)));
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  return kOk;
}

int cmd_probe_onehot(int length, int hot, double hot_value, double cold_value, const std::string& at) {
  try {
    const sc::CellAddress anchor = parse_anchor(at);
    print_fragment(anchor, sc::column_fragment(sc::one_hot(length, hot, hot_value, cold_value), anchor));
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  return kOk;
}

int cmd_probe_boundaries(const std::string& kind, const std::string& at) {
  try {
    const sc::CellAddress anchor = parse_anchor(at);
    print_fragment(anchor, sc::column_fragment(sc::boundary_values(kind), anchor));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return kOk;
}

int cmd_branches(const std::string& wb_path) {
  sc::LoadedWorkbook wb = sc::load_workbook(wb_path);
  std::vector<std::vector<std::string>> rows{{"CELL", "KIND", "ARGS", "FORMULA"}};
  for (const sc::BranchPoint& b : sc::list_branch_points(wb.workbook)) {
    const sc::Cell* cell = wb.workbook.cell(b.address);
    rows.push_back({sc::format_address(b.address), std::string(sc::branch_kind_name(b.kind)),
                    std::to_string(b.argument_count), cell != nullptr ? cell->as_formula().source : ""});
  }
  print_table(rows);
  std::cout << (rows.size() - 1) << " branch points\n";
  return kOk;
}

int cmd_summary(const std::string& log_path, const std::string& wb_path) {
  sc::SuiteSummary summary = sc::summarize(sc::read_log(log_path));
  std::string fp;
  if (!wb_path.empty()) {
    fp = sc::load_workbook(wb_path).fingerprint;
    std::cout << "Workbook: " << wb_path << " (" << fp << ")\n";
  }
  print_summary(summary, fp);
  return summary.all_passed() ? kOk : kFailed;
}

int cmd_calc(const std::string& wb_path, const std::vector<std::string>& targets) {
  sc::LoadedWorkbook wb = sc::load_workbook(wb_path);
  sc::EvalContext ctx = sc::recalculated_context(wb.workbook);
  std::vector<sc::CellAddress> cells;
  if (targets.empty()) {
    for (const sc::Sheet& sheet : wb.workbook.sheets()) {
      for (const auto& entry : sheet.cells()) {
        cells.push_back(sc::CellAddress{sheet.name(), entry.first.first, entry.first.second, false, false});
      }
    }
  } else {
    for (const std::string& t : targets) {
      for (sc::CellAddress& a : sc::range_cells(sc::resolve_target(wb.workbook, t))) cells.push_back(std::move(a));
    }
  }
  for (const sc::CellAddress& a : cells) {
    std::cout << sc::format_address(a) << " = " << show(ctx.lookup(a)) << "\n";
  }
  return kOk;
}

int cmd_format(const std::string& wb_path, bool in_place) {
  sc::LoadedWorkbook wb = sc::load_workbook(wb_path);
  if (in_place) {
    sc::save_workbook(wb.workbook, wb_path);
  } else {
    std::cout << sc::to_text(wb.workbook);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spreadsheet testing: invariants, data tables, substitutions and regression comparisons"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string wb_path;
  std::string suite_path;
  std::string log_path;

  auto* check = app.add_subcommand("check", "Run invariant tests (from --suite, or discovered in the workbook)");
  check->add_option("workbook", wb_path, "Workbook file")->required();
  check->add_option("--suite", suite_path, "Suite file; only its invariant tests run");
  check->add_option("--log", log_path, "Append records to this log");
  check->callback([&] { action = [&] { return cmd_check(wb_path, suite_path, log_path); }; });

  auto* test = app.add_subcommand("test", "Run a full test suite and print the summary");
  test->add_option("workbook", wb_path, "Workbook file")->required();
  test->add_option("--suite", suite_path, "Suite file")->required();
  test->add_option("--log", log_path, "Append records to this log");
  test->callback([&] { action = [&] { return cmd_test(wb_path, suite_path, log_path); }; });

  std::vector<std::string> books;
  std::string scenarios_path;
  std::string map_path;
  std::string tol_text;
  std::string baseline_path;
  bool as_json = false;
  auto* regress = app.add_subcommand("regress", "Compare two workbook versions (or one against a baseline)");
  regress->add_option("workbooks", books, "OLD NEW, or just NEW with --baseline")->required()->expected(1, 2);
  regress->add_option("--scenarios", scenarios_path, "Scenario file")->required();
  regress->add_option("--map", map_path, "Correspondence map file");
  regress->add_option("--tol", tol_text, "Tolerance as ATOL,RTOL (default 1e-9,1e-9)");
  regress->add_option("--baseline", baseline_path, "Recorded baseline standing in for the old version");
  regress->add_flag("--json", as_json, "Print the report as JSON");
  regress->callback([&] {
    action = [&] { return cmd_regress(books, scenarios_path, map_path, tol_text, baseline_path, as_json); };
  });

  std::string out_path;
  auto* baseline = app.add_subcommand("baseline", "Record scenario outputs of a workbook");
  baseline->add_option("workbook", wb_path, "Workbook file")->required();
  baseline->add_option("--scenarios", scenarios_path, "Scenario file")->required();
  baseline->add_option("--out", out_path, "Baseline file to write")->required();
  baseline->callback([&] { action = [&] { return cmd_baseline(wb_path, scenarios_path, out_path); }; });

  std::string at = "A1";
  auto* probe = app.add_subcommand("probe", "Emit probe inputs as workbook cell lines");
  probe->require_subcommand(1);
  std::string dims;
  bool extended = false;
  auto* sentinels = probe->add_subcommand("sentinels", "Lookup table with value 10*row+col");
  sentinels->add_option("size", dims, "RxC, each 1..9 (1..99 with --extended)")->required();
  sentinels->add_flag("--extended", extended, "Use 100*row+col");
  sentinels->add_option("--at", at, "Top-left cell, optionally with sheet");
  sentinels->callback([&] { action = [&] { return cmd_probe_sentinels(dims, extended, at); }; });

  int length = 0;
  int hot = 0;
  double hot_value = 1;
  double cold_value = 0;
  auto* onehot = probe->add_subcommand("onehot", "Column with a single non-zero entry");
  onehot->add_option("length", length, "Number of cells")->required();
  onehot->add_option("index", hot, "1-based position of the hot cell")->required();
  onehot->add_option("--hot", hot_value, "Hot value (default 1)");
  onehot->add_option("--cold", cold_value, "Cold value (default 0)");
  onehot->add_option("--at", at, "First cell, optionally with sheet");
  onehot->callback([&] { action = [&] { return cmd_probe_onehot(length, hot, hot_value, cold_value, at); }; });

  std::string kind;
  auto* boundaries = probe->add_subcommand("boundaries", "Boundary values for rate, count or amount inputs");
  boundaries->add_option("kind", kind, "rate | count | amount")->required();
  boundaries->add_option("--at", at, "First cell, optionally with sheet");
  boundaries->callback([&] { action = [&] { return cmd_probe_boundaries(kind, at); }; });

  auto* branches = app.add_subcommand("branches", "List IF/MIN/MAX branch points");
  branches->add_option("workbook", wb_path, "Workbook file")->required();
  branches->callback([&] { action = [&] { return cmd_branches(wb_path); }; });

  auto* summary = app.add_subcommand("summary", "Latest status per test id from a log");
  summary->add_option("--log", log_path, "Log file")->required();
  summary->add_option("--workbook", wb_path, "Mark records whose fingerprint differs from this workbook");
  summary->callback([&] { action = [&] { return cmd_summary(log_path, wb_path); }; });

  std::vector<std::string> targets;
  auto* calc = app.add_subcommand("calc", "Recalculate and print cell values");
  calc->add_option("workbook", wb_path, "Workbook file")->required();
  calc->add_option("cells", targets, "Cells, ranges or names (default: every non-blank cell)");
  calc->callback([&] { action = [&] { return cmd_calc(wb_path, targets); }; });

  bool in_place = false;
  auto* format = app.add_subcommand("format", "Print the canonical form of a workbook");
  format->add_option("workbook", wb_path, "Workbook file")->required();
  format->add_flag("-w,--write", in_place, "Rewrite the file in place");
  format->callback([&] { action = [&] { return cmd_format(wb_path, in_place); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFileError;
  }
}
