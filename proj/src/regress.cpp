#include "sheetcheck/regress.hpp"

#include <algorithm>
#include <stdexcept>

#include "sheetcheck/textio.hpp"

namespace sheetcheck {

void CorrespondenceMap::add(const RangeRef& old_block, const RangeRef& new_block) {
  if (old_block.rows() != new_block.rows() || old_block.cols() != new_block.cols()) {
    throw std::invalid_argument("mapped blocks " + format_range(old_block) + " and " + format_range(new_block) +
                                " differ in shape");
  }
  const auto olds = range_cells(old_block);
  const auto news = range_cells(new_block);
  for (std::size_t i = 0; i < olds.size(); ++i) {
    auto existing = forward_.find(olds[i]);
    if (existing != forward_.end()) {
      if (same_location(existing->second, news[i])) continue;
      throw std::invalid_argument(format_address(olds[i]) + " is mapped twice");
    }
    if (!images_.insert(news[i]).second) {
      throw std::invalid_argument("map is not injective: " + format_address(news[i]) + " is a target twice");
    }
    forward_.emplace(olds[i], news[i]);
  }
}

CellAddress CorrespondenceMap::operator()(const CellAddress& old_address) const {
  auto it = forward_.find(old_address);
  if (it == forward_.end()) {
    CellAddress a = old_address;
    a.row_absolute = a.col_absolute = false;
    return a;
  }
  return it->second;
}

CorrespondenceMap make_correspondence(const Workbook& old_wb, const Workbook& new_wb,
                                      const std::vector<std::pair<std::string, std::string>>& pairs) {
  CorrespondenceMap map;
  for (const auto& [old_text, new_text] : pairs) {
    map.add(resolve_target(old_wb, old_text), resolve_target(new_wb, new_text));
  }
  return map;
}

std::string_view regression_label(RegressionStatus s) {
  switch (s) {
    case RegressionStatus::Matches: return "matches reference";
    case RegressionStatus::Differs: return "differs from reference";
    case RegressionStatus::Error: return "error";
  }
  return "error";
}

std::size_t RegressionReport::cell_count() const {
  std::size_t n = 0;
  for (const auto& s : scenarios) n += s.cells.size();
  return n;
}

std::size_t RegressionReport::mismatch_count() const {
  std::size_t n = 0;
  for (const auto& s : scenarios) {
    n += static_cast<std::size_t>(std::count_if(s.cells.begin(), s.cells.end(), [](const auto& c) { return !c.passed; }));
  }
  return n;
}

namespace {

std::vector<CellAddress> expand(const std::vector<RangeRef>& outputs) {
  CellSet unique;
  for (const RangeRef& r : outputs) {
    for (CellAddress& a : range_cells(r)) unique.insert(std::move(a));
  }
  return {unique.begin(), unique.end()};
}

void require_sheet(const Workbook& wb, const CellAddress& a, std::string_view what) {
  if (wb.find_sheet(a.sheet) == nullptr) {
    throw std::invalid_argument(std::string(what) + " " + format_address(a) + " refers to an unknown sheet");
  }
}

// Cells written for one scenario input. Defined names resolve in the target
// workbook itself; addresses resolve against `resolver` and pass through map.
std::vector<CellAddress> input_cells(const Workbook& resolver, const Workbook& target, const ScenarioInput& in,
                                     const CorrespondenceMap* map) {
  std::vector<CellAddress> cells;
  if (is_valid_identifier(in.target)) {
    cells = range_cells(target.resolve_name(in.target));
  } else {
    cells = range_cells(resolve_target(resolver, in.target));
    if (map != nullptr) {
      for (CellAddress& a : cells) a = (*map)(a);
    }
  }
  for (const CellAddress& a : cells) require_sheet(target, a, "input");
  return cells;
}

// Applies a scenario to a copy of wb and returns the values at `cells`.
std::vector<Value> evaluate_scenario(const Workbook& resolver, const Workbook& wb, const Scenario& scenario,
                                     const CorrespondenceMap* map, const std::vector<CellAddress>& cells) {
  Workbook work = wb;
  for (const ScenarioInput& in : scenario.inputs) {
    try {
      for (const CellAddress& a : input_cells(resolver, work, in, map)) work.set_value(a, in.value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("scenario '" + scenario.name + "': target '" + in.target + "': " + e.what());
    }
  }
  EvalContext ctx = recalculated_context(work);
  std::vector<Value> values;
  values.reserve(cells.size());
  for (const CellAddress& a : cells) values.push_back(ctx.lookup(a));
  return values;
}

std::vector<const Scenario*> sorted_scenarios(const std::vector<Scenario>& scenarios) {
  std::vector<const Scenario*> out;
  for (const Scenario& s : scenarios) out.push_back(&s);
  std::stable_sort(out.begin(), out.end(), [](const Scenario* a, const Scenario* b) { return a->name < b->name; });
  return out;
}

void finish(RegressionReport& report) {
  report.status = RegressionStatus::Matches;
  for (const ScenarioResult& s : report.scenarios) {
    if (!s.passed) report.status = RegressionStatus::Differs;
  }
}

ScenarioResult compare_cells(const std::string& name, const std::vector<CellAddress>& old_cells,
                             const std::vector<Value>& old_values, const std::vector<CellAddress>& new_cells,
                             const std::vector<Value>& new_values, const Tolerance& tol) {
  ScenarioResult result{name, {}, true};
  for (std::size_t i = 0; i < old_cells.size(); ++i) {
    bool ok = values_match(new_values[i], old_values[i], tol);
    result.passed = result.passed && ok;
    result.cells.push_back(CellComparison{old_cells[i], new_cells[i], old_values[i], new_values[i], ok});
  }
  return result;
}

}  // namespace

RegressionReport run_regression(const Workbook& old_wb, const Workbook& new_wb,
                                const std::vector<Scenario>& scenarios, const std::vector<RangeRef>& outputs,
                                const CorrespondenceMap& map, const Tolerance& tol, const RegressOptions& opts) {
  RegressionReport report;
  report.tolerance = tol;
  report.started_at = opts.clock();
  report.reference_fingerprint = opts.reference_fingerprint.empty() ? fingerprint(old_wb) : opts.reference_fingerprint;
  report.candidate_fingerprint = opts.candidate_fingerprint.empty() ? fingerprint(new_wb) : opts.candidate_fingerprint;
  try {
    const std::vector<CellAddress> old_cells = expand(outputs);
    std::vector<CellAddress> new_cells;
    for (const CellAddress& a : old_cells) {
      require_sheet(old_wb, a, "output");
      new_cells.push_back(map(a));
      require_sheet(new_wb, new_cells.back(), "mapped output");
    }
    for (const Scenario* s : sorted_scenarios(scenarios)) {
      std::vector<Value> old_values = evaluate_scenario(old_wb, old_wb, *s, nullptr, old_cells);
      std::vector<Value> new_values = evaluate_scenario(old_wb, new_wb, *s, &map, new_cells);
      report.scenarios.push_back(compare_cells(s->name, old_cells, old_values, new_cells, new_values, tol));
    }
    finish(report);
  } catch (const std::exception& e) {
    report.status = RegressionStatus::Error;
    report.error = e.what();
  }
  report.finished_at = opts.clock();
  return report;
}

Baseline record_baseline(const Workbook& wb, const std::vector<Scenario>& scenarios,
                         const std::vector<RangeRef>& outputs, const RegressOptions& opts) {
  Baseline baseline;
  baseline.fingerprint = opts.reference_fingerprint.empty() ? fingerprint(wb) : opts.reference_fingerprint;
  baseline.recorded_at = opts.clock();
  const std::vector<CellAddress> cells = expand(outputs);
  for (const CellAddress& a : cells) require_sheet(wb, a, "output");
  for (const Scenario& s : scenarios) {
    if (baseline.scenarios.count(s.name) != 0) {
      throw std::invalid_argument("duplicate scenario '" + s.name + "'");
    }
    std::vector<Value> values = evaluate_scenario(wb, wb, s, nullptr, cells);
    ValueMap& recorded = baseline.scenarios[s.name];
    for (std::size_t i = 0; i < cells.size(); ++i) recorded.emplace(cells[i], std::move(values[i]));
  }
  return baseline;
}

RegressionReport compare_to_baseline(const Workbook& wb, const Baseline& baseline,
                                     const std::vector<Scenario>& scenarios, const CorrespondenceMap& map,
                                     const Tolerance& tol, const RegressOptions& opts) {
  RegressionReport report;
  report.tolerance = tol;
  report.started_at = opts.clock();
  report.reference_fingerprint = baseline.fingerprint;
  report.candidate_fingerprint = opts.candidate_fingerprint.empty() ? fingerprint(wb) : opts.candidate_fingerprint;
  try {
    if (baseline.scenarios.empty()) throw std::invalid_argument("baseline has no scenarios");
    for (const auto& [name, recorded] : baseline.scenarios) {
      auto def = std::find_if(scenarios.begin(), scenarios.end(), [&](const Scenario& s) { return s.name == name; });
      if (def == scenarios.end()) {
        throw std::invalid_argument("baseline scenario '" + name + "' has no inputs definition");
      }
      std::vector<CellAddress> old_cells;
      std::vector<Value> old_values;
      std::vector<CellAddress> new_cells;
      for (const auto& [addr, value] : recorded) {
        old_cells.push_back(addr);
        old_values.push_back(value);
        new_cells.push_back(map(addr));
        require_sheet(wb, new_cells.back(), "mapped output");
      }
      std::vector<Value> new_values = evaluate_scenario(wb, wb, *def, &map, new_cells);
      report.scenarios.push_back(compare_cells(name, old_cells, old_values, new_cells, new_values, tol));
    }
    finish(report);
  } catch (const std::exception& e) {
    report.status = RegressionStatus::Error;
    report.error = e.what();
  }
  report.finished_at = opts.clock();
  return report;
}

}  // namespace sheetcheck
