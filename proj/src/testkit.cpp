#include "sheetcheck/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "sheetcheck/engine.hpp"
#include "sheetcheck/formula.hpp"
#include "sheetcheck/textio.hpp"

namespace sheetcheck {

namespace {

// x - y <= bound, judged on the exact difference. A rounded difference can
// land on the bound when the true one lies just past it, so the rounding
// error (Knuth's TwoSum) breaks the tie.
bool difference_within(double x, double y, double bound) {
  const double s = x - y;
  if (!std::isfinite(s)) return s <= bound;
  if (s != bound) return s < bound;
  const double v = s - x;
  const double err = (x - (s - v)) + (-y - v);
  return err <= 0.0;
}

}  // namespace

bool approx_equal(double a, double b, const Tolerance& tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  const double bound = tol.atol + tol.rtol * std::fabs(b);
  return difference_within(a, b, bound) && difference_within(b, a, bound);
}

bool values_match(const Value& actual, const Value& expected, const Tolerance& tol) {
  if (actual.is_number() && expected.is_number()) {
    return approx_equal(actual.as_number(), expected.as_number(), tol);
  }
  return actual == expected;
}

std::string_view comparator_text(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "<>";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "=";
}

std::optional<Comparator> parse_comparator(std::string_view text) {
  for (Comparator c : {Comparator::Eq, Comparator::Ne, Comparator::Lt, Comparator::Le, Comparator::Gt,
                       Comparator::Ge}) {
    if (comparator_text(c) == text) return c;
  }
  if (text == "==") return Comparator::Eq;
  return std::nullopt;
}

std::string Condition::text() const { return lhs + std::string(comparator_text(comparator)) + rhs; }

Condition parse_condition(std::string_view text, Tolerance tol) {
  const std::vector<Token> tokens = tokenize(text);
  int depth = 0;
  const Token* split = nullptr;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::LParen) ++depth;
    if (t.kind == TokenKind::RParen) --depth;
    if (depth == 0 && parse_comparator(t.text) && t.kind != TokenKind::String) split = &t;
  }
  if (split == nullptr) throw FormulaError("condition has no top-level comparison", 0);
  std::string_view body = text;
  std::size_t lhs_begin = body.find_first_not_of(" \t");
  if (lhs_begin != std::string_view::npos && body[lhs_begin] == '=') ++lhs_begin;
  Condition c;
  c.lhs = std::string(text.substr(lhs_begin, split->position - lhs_begin));
  c.comparator = *parse_comparator(split->text);
  c.rhs = std::string(text.substr(split->position + split->text.size()));
  c.tolerance = tol;
  auto strip = [](std::string& s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
  };
  strip(c.lhs);
  strip(c.rhs);
  // Both sides must stand alone as expressions.
  parse_formula(c.lhs, "Sheet1");
  parse_formula(c.rhs, "Sheet1");
  return c;
}

std::string_view kind_name(const TestCase& t) {
  switch (t.kind.index()) {
    case 0: return "invariant";
    case 1: return "table";
    default: return "substitution";
  }
}

void validate_suite(const std::vector<TestCase>& suite) {
  std::set<std::string> ids;
  for (const TestCase& t : suite) {
    if (!ids.insert(t.id).second) throw std::invalid_argument("duplicate test id '" + t.id + "'");
    const auto* table = std::get_if<TableTest>(&t.kind);
    if (table == nullptr) continue;
    const std::string where = "table test '" + t.id + "': ";
    if (table->inputs.size() == 1) {
      if (table->outputs.empty()) throw std::invalid_argument(where + "no outputs");
      if (table->expected.size() != table->row_values.size()) {
        throw std::invalid_argument(where + "expected rows must match input values");
      }
      for (const auto& row : table->expected) {
        if (row.size() != table->outputs.size()) {
          throw std::invalid_argument(where + "each expected row needs one value per output");
        }
      }
    } else if (table->inputs.size() == 2) {
      if (table->outputs.size() != 1) throw std::invalid_argument(where + "two-input tables have one output");
      if (table->expected.size() != table->row_values.size()) {
        throw std::invalid_argument(where + "expected rows must match row values");
      }
      for (const auto& row : table->expected) {
        if (row.size() != table->col_values.size()) {
          throw std::invalid_argument(where + "expected columns must match column values");
        }
      }
    } else {
      throw std::invalid_argument(where + "needs one or two inputs");
    }
  }
}

std::string_view status_text(TestStatus s) {
  switch (s) {
    case TestStatus::Passed: return "Passed";
    case TestStatus::Failed: return "Failed";
    case TestStatus::Error: return "Error";
  }
  return "Error";
}

std::optional<TestStatus> parse_status(std::string_view text) {
  for (TestStatus s : {TestStatus::Passed, TestStatus::Failed, TestStatus::Error}) {
    if (status_text(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view outcome_text(Outcome o) {
  switch (o) {
    case Outcome::True: return "TRUE";
    case Outcome::False: return "FALSE";
    case Outcome::Error: return "ERROR";
  }
  return "ERROR";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::True, Outcome::False, Outcome::Error}) {
    if (outcome_text(o) == text) return o;
  }
  return std::nullopt;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm parts{};
  gmtime_r(&secs, &parts);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buf;
}

void LogSink::append(const TestRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  write(record);
}

namespace {

TestRecord start_record(const Workbook& wb, const TestCase& test, const RunOptions& opts) {
  TestRecord r;
  r.id = test.id;
  r.description = test.description;
  r.kind = std::string(kind_name(test));
  r.run_at = opts.clock();
  r.fingerprint = opts.fingerprint.empty() ? fingerprint(wb) : opts.fingerprint;
  return r;
}

CellAddress single_cell(const Workbook& wb, std::string_view target) {
  RangeRef r = resolve_target(wb, target);
  if (r.size() != 1) throw std::invalid_argument("'" + std::string(target) + "' is not a single cell");
  if (wb.find_sheet(r.start.sheet) == nullptr) {
    throw std::invalid_argument("'" + std::string(target) + "' refers to an unknown sheet");
  }
  return r.start;
}

// Runs body, turning resolution failures into an Error status.
template <class Body>
TestRecord guarded(TestRecord record, Body&& body) {
  try {
    body(record);
  } catch (const std::exception& e) {
    record.status = TestStatus::Error;
    record.message = e.what();
  }
  return record;
}

Outcome compare_outcome(const Value& actual, const Value& expected, const Tolerance& tol) {
  if (values_match(actual, expected, tol)) return Outcome::True;
  return actual.is_error() ? Outcome::Error : Outcome::False;
}

// Saves and restores a set of cells on a working copy.
class Snapshot {
 public:
  Snapshot(const Workbook& wb, const std::vector<CellAddress>& cells) {
    for (const CellAddress& a : cells) {
      const Cell* c = wb.cell(a);
      saved_.emplace_back(a, c == nullptr ? std::nullopt : std::optional<Cell>(*c));
    }
  }
  void restore(Workbook& wb) const {
    for (const auto& [a, c] : saved_) {
      if (c) {
        wb.set_cell(a, *c);
      } else {
        wb.erase_cell(a);
      }
    }
  }

 private:
  std::vector<std::pair<CellAddress, std::optional<Cell>>> saved_;
};

std::string describe_inputs(const std::vector<CellAddress>& inputs, const std::vector<Value>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_address(inputs[i]) + "=" + display_text(values[i]);
  }
  return out + "]";
}

}  // namespace

TestRecord run_invariant(const Workbook& wb, const TestCase& test, const RunOptions& opts) {
  const auto& inv = std::get<InvariantTest>(test.kind);
  return guarded(start_record(wb, test, opts), [&](TestRecord& r) {
    const CellAddress cell = single_cell(wb, inv.cell);
    EvalContext ctx = recalculated_context(wb);
    Value actual = ctx.lookup(cell);
    ConditionDetail d{format_address(cell) + "=\"" + inv.pass_text + "\"", actual, Value::text(inv.pass_text),
                      Outcome::False};
    if (actual.is_error()) {
      d.outcome = Outcome::Error;
      r.status = TestStatus::Error;
      r.message = "cell evaluates to " + std::string(error_code(actual.as_error()));
    } else if (actual.is_text() && fold_case(actual.as_text()) == fold_case(inv.pass_text)) {
      d.outcome = Outcome::True;
      r.status = TestStatus::Passed;
    } else {
      r.status = TestStatus::Failed;
    }
    r.details.push_back(std::move(d));
  });
}

TestRecord run_table(const Workbook& wb, const TestCase& test, const RunOptions& opts) {
  const auto& table = std::get<TableTest>(test.kind);
  return guarded(start_record(wb, test, opts), [&](TestRecord& r) {
    validate_suite({test});
    std::vector<CellAddress> inputs;
    for (const std::string& in : table.inputs) inputs.push_back(single_cell(wb, in));
    std::vector<CellAddress> outputs;
    for (const std::string& out : table.outputs) outputs.push_back(single_cell(wb, out));

    Workbook work = wb;
    const Snapshot snapshot(work, inputs);
    bool all = true;
    auto evaluate = [&](const std::vector<Value>& point, const std::vector<Value>& expected) {
      for (std::size_t i = 0; i < inputs.size(); ++i) work.set_value(inputs[i], point[i]);
      EvalContext ctx = recalculated_context(work);
      for (std::size_t j = 0; j < outputs.size(); ++j) {
        Value actual = ctx.lookup(outputs[j]);
        Outcome o = compare_outcome(actual, expected[j], table.tolerance);
        all = all && o == Outcome::True;
        r.details.push_back(ConditionDetail{format_address(outputs[j]) + " " + describe_inputs(inputs, point),
                                            std::move(actual), expected[j], o});
      }
      snapshot.restore(work);
    };

    if (inputs.size() == 1) {
      for (std::size_t i = 0; i < table.row_values.size(); ++i) {
        evaluate({table.row_values[i]}, table.expected[i]);
      }
    } else {
      for (std::size_t i = 0; i < table.row_values.size(); ++i) {
        for (std::size_t j = 0; j < table.col_values.size(); ++j) {
          evaluate({table.row_values[i], table.col_values[j]}, {table.expected[i][j]});
        }
      }
    }
    r.status = all ? TestStatus::Passed : TestStatus::Failed;
  });
}

TestRecord run_substitution(const Workbook& wb, const TestCase& test, const RunOptions& opts) {
  const auto& sub = std::get<SubstitutionTest>(test.kind);
  TestRecord record = start_record(wb, test, opts);
  record.substitutions = sub.substitutions;
  return guarded(std::move(record), [&](TestRecord& r) {
    std::vector<RangeRef> targets;
    for (const SubstitutionSpec& s : sub.substitutions) {
      RangeRef t = resolve_target(wb, s.target);
      if (wb.find_sheet(t.start.sheet) == nullptr) {
        throw std::invalid_argument("substitution target '" + s.target + "' refers to an unknown sheet");
      }
      targets.push_back(t);
    }

    // The caller's workbook is never touched; the copy is dropped afterwards.
    Workbook work = wb;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (const CellAddress& a : range_cells(targets[i])) work.set_value(a, sub.substitutions[i].value);
    }
    EvalContext ctx = recalculated_context(work);
    const std::string home = work.default_sheet();

    bool all = true;
    for (const Condition& c : sub.conditions) {
      ConditionDetail d{c.text(), Value(), Value(), Outcome::Error};
      try {
        d.value1 = eval(*parse_formula(c.lhs, home), ctx);
        d.value2 = eval(*parse_formula(c.rhs, home), ctx);
      } catch (const FormulaError& e) {
        d.value1 = Value::error(ErrorKind::Name);
        if (!r.message.empty()) r.message += "; ";
        r.message += c.text() + ": " + e.what();
      }
      if (!d.value1.is_error() && !d.value2.is_error()) {
        bool holds;
        const bool numeric = d.value1.is_number() && d.value2.is_number();
        if (numeric && c.comparator == Comparator::Eq) {
          holds = approx_equal(d.value1.as_number(), d.value2.as_number(), c.tolerance);
        } else if (numeric && c.comparator == Comparator::Ne) {
          holds = !approx_equal(d.value1.as_number(), d.value2.as_number(), c.tolerance);
        } else {
          const int cmp = compare_values(d.value1, d.value2);
          switch (c.comparator) {
            case Comparator::Eq: holds = cmp == 0; break;
            case Comparator::Ne: holds = cmp != 0; break;
            case Comparator::Lt: holds = cmp < 0; break;
            case Comparator::Le: holds = cmp <= 0; break;
            case Comparator::Gt: holds = cmp > 0; break;
            default: holds = cmp >= 0; break;
          }
        }
        d.outcome = holds ? Outcome::True : Outcome::False;
      }
      all = all && d.outcome == Outcome::True;
      r.details.push_back(std::move(d));
    }
    r.status = all ? TestStatus::Passed : TestStatus::Failed;
  });
}

TestRecord run_test(const Workbook& wb, const TestCase& test, const RunOptions& opts) {
  switch (test.kind.index()) {
    case 0: return run_invariant(wb, test, opts);
    case 1: return run_table(wb, test, opts);
    default: return run_substitution(wb, test, opts);
  }
}

namespace {

void tally(SuiteSummary& s, const TestRecord& r) {
  ++s.tests_run;
  switch (r.status) {
    case TestStatus::Passed: ++s.passed; break;
    case TestStatus::Failed: ++s.failed; break;
    case TestStatus::Error: ++s.errored; break;
  }
  s.last_run_at = std::max(s.last_run_at, r.run_at);
  s.tests.push_back(SummaryEntry{r.id, r.description, r.status, r.run_at, r.fingerprint});
}

}  // namespace

SuiteSummary run_suite(const Workbook& wb, const std::vector<TestCase>& suite, LogSink& log,
                       const RunOptions& opts) {
  validate_suite(suite);
  RunOptions shared = opts;
  if (shared.fingerprint.empty()) shared.fingerprint = fingerprint(wb);
  SuiteSummary summary;
  for (const TestCase& t : suite) {
    TestRecord r = run_test(wb, t, shared);
    log.append(r);
    tally(summary, r);
  }
  return summary;
}

SuiteSummary summarize(const std::vector<TestRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, const TestRecord*> latest;
  for (const TestRecord& r : records) {
    auto [it, inserted] = latest.insert_or_assign(r.id, &r);
    if (inserted) order.push_back(r.id);
  }
  SuiteSummary s;
  for (const std::string& id : order) tally(s, *latest.at(id));
  return s;
}

bool is_stale(const TestRecord& record, std::string_view workbook_fingerprint) {
  return record.fingerprint != workbook_fingerprint;
}

std::vector<TestCase> discover_invariants(const Workbook& wb, std::string_view pass_text) {
  const std::string folded = fold_case(pass_text);
  std::vector<TestCase> out;
  for (const Sheet& sheet : wb.sheets()) {
    for (const auto& [pos, cell] : sheet.cells()) {
      if (!cell.is_formula()) continue;
      const auto* call = std::get_if<CallNode>(&cell.as_formula().ast->node);
      if (call == nullptr || call->function != "IF" || call->args.size() < 2) continue;
      const auto* then = std::get_if<TextNode>(&call->args[1]->node);
      if (then == nullptr || fold_case(then->value) != folded) continue;
      const std::string where = format_address(CellAddress{sheet.name(), pos.first, pos.second, false, false});
      out.push_back(TestCase{where, cell.as_formula().source, InvariantTest{where, std::string(pass_text)}});
    }
  }
  return out;
}

}  // namespace sheetcheck
