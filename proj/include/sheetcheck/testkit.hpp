#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetcheck/value.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

// ---------------------------------------------------------------------------
// Tolerance
// ---------------------------------------------------------------------------

struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;

  static Tolerance exact() { return Tolerance{0.0, 0.0}; }
  bool operator==(const Tolerance&) const = default;
};

/// True iff both  a - b <= atol + rtol*|b|  and  b - a <= atol + rtol*|b|.
/// The bound scales with the second argument only, so the relation is not
/// symmetric once rtol > 0. Zero tolerances reduce to exact equality.
bool approx_equal(double a, double b, const Tolerance& tol);

/// Numbers via approx_equal; everything else must match exactly (error
/// values by kind).
bool values_match(const Value& actual, const Value& expected, const Tolerance& tol);

// ---------------------------------------------------------------------------
// Test declarations
// ---------------------------------------------------------------------------

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view comparator_text(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view text);

/// lhs and rhs are formula expressions. The tolerance applies to = and <>
/// when both sides are numbers.
struct Condition {
  std::string lhs;
  Comparator comparator = Comparator::Eq;
  std::string rhs;
  Tolerance tolerance;

  std::string text() const;
};

/// Splits "lhs<op>rhs" at its last comparison outside parentheses, keeping
/// both sides as written. Throws FormulaError if there is no such comparison
/// or either side does not parse.
Condition parse_condition(std::string_view text, Tolerance tol = {});

enum class SubstitutionMode { Direct };

/// target is a cell, range or defined name.
struct SubstitutionSpec {
  std::string target;
  SubstitutionMode mode = SubstitutionMode::Direct;
  Value value;
};

struct InvariantTest {
  std::string cell;
  std::string pass_text = "Pass";
};

/// One input: row_values sweeps inputs[0] and each outcome row lists every
/// output. Two inputs: row_values x col_values sweep (inputs[0], inputs[1])
/// against the single output.
struct TableTest {
  std::vector<std::string> inputs;
  std::vector<Value> row_values;
  std::vector<Value> col_values;
  std::vector<std::string> outputs;
  std::vector<std::vector<Value>> expected;
  Tolerance tolerance;
};

struct SubstitutionTest {
  std::vector<SubstitutionSpec> substitutions;
  std::vector<Condition> conditions;
};

struct TestCase {
  std::string id;
  std::string description;
  std::variant<InvariantTest, TableTest, SubstitutionTest> kind;
};

std::string_view kind_name(const TestCase& t);

/// Throws std::invalid_argument for duplicate ids or badly shaped tables.
void validate_suite(const std::vector<TestCase>& suite);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

enum class TestStatus { Passed, Failed, Error };
std::string_view status_text(TestStatus s);
std::optional<TestStatus> parse_status(std::string_view text);

enum class Outcome { True, False, Error };
std::string_view outcome_text(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view text);

struct ConditionDetail {
  std::string condition;
  Value value1;
  Value value2;
  Outcome outcome = Outcome::False;
};

struct TestRecord {
  std::string id;
  std::string description;
  std::string kind;
  TestStatus status = TestStatus::Error;
  std::string run_at;
  std::string fingerprint;
  std::vector<SubstitutionSpec> substitutions;
  std::vector<ConditionDetail> details;
  std::string message;
};

struct SummaryEntry {
  std::string id;
  std::string description;
  TestStatus status;
  std::string run_at;
  std::string fingerprint;
};

struct SuiteSummary {
  std::string last_run_at;
  std::size_t tests_run = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t errored = 0;
  std::vector<SummaryEntry> tests;

  bool all_passed() const { return failed == 0 && errored == 0; }
};

/// ISO-8601 UTC with seconds, e.g. 2004-04-10T16:29:00Z.
std::string utc_timestamp(std::chrono::system_clock::time_point t);

struct RunOptions {
  /// Recorded on every record; computed from the workbook when empty.
  std::string fingerprint;
  std::function<std::string()> clock = [] {
    return utc_timestamp(std::chrono::system_clock::now());
  };
};

/// Append-only destination for test records. Appends are serialized.
class LogSink {
 public:
  virtual ~LogSink() = default;
  void append(const TestRecord& record);

 protected:
  virtual void write(const TestRecord& record) = 0;

 private:
  std::mutex mutex_;
};

class MemoryLog : public LogSink {
 public:
  const std::vector<TestRecord>& records() const { return records_; }

 protected:
  void write(const TestRecord& record) override { records_.push_back(record); }

 private:
  std::vector<TestRecord> records_;
};

// ---------------------------------------------------------------------------
// Runners. Each works on a private copy of the workbook.
// ---------------------------------------------------------------------------

TestRecord run_invariant(const Workbook& wb, const TestCase& test, const RunOptions& opts = {});
TestRecord run_table(const Workbook& wb, const TestCase& test, const RunOptions& opts = {});
TestRecord run_substitution(const Workbook& wb, const TestCase& test, const RunOptions& opts = {});
/// Dispatches on the test kind.
TestRecord run_test(const Workbook& wb, const TestCase& test, const RunOptions& opts = {});

/// Runs tests in declared order, appending one record per test.
SuiteSummary run_suite(const Workbook& wb, const std::vector<TestCase>& suite, LogSink& log,
                       const RunOptions& opts = {});

/// Latest record per id (by position in the log), in first-seen order.
SuiteSummary summarize(const std::vector<TestRecord>& records);

bool is_stale(const TestRecord& record, std::string_view workbook_fingerprint);

/// Invariant tests for every formula cell of the form IF(cond, "<pass>", ...)
/// whose then-branch is a text literal equal to pass_text. Ids are the cell
/// addresses, in workbook order.
std::vector<TestCase> discover_invariants(const Workbook& wb, std::string_view pass_text = "Pass");

}  // namespace sheetcheck
