#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheetcheck/engine.hpp"
#include "sheetcheck/testkit.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

struct ScenarioInput {
  std::string target;  // cell, range or defined name
  Value value;
};

struct Scenario {
  std::string name;
  std::vector<ScenarioInput> inputs;
};

/// Old-version address to new-version address. Unmapped addresses compare
/// at the same coordinates. Blocks map cell by cell and must have equal
/// shapes, which covers rows or columns that moved as a unit.
class CorrespondenceMap {
 public:
  /// Throws std::invalid_argument on shape mismatch or when two old cells
  /// would map to the same new cell.
  void add(const RangeRef& old_block, const RangeRef& new_block);
  CellAddress operator()(const CellAddress& old_address) const;
  bool empty() const { return forward_.empty(); }
  const std::map<CellAddress, CellAddress, LocationLess>& pairs() const { return forward_; }

 private:
  std::map<CellAddress, CellAddress, LocationLess> forward_;
  CellSet images_;
};

/// Resolves textual (old, new) pairs: old side against old_wb, new side
/// against new_wb.
CorrespondenceMap make_correspondence(const Workbook& old_wb, const Workbook& new_wb,
                                      const std::vector<std::pair<std::string, std::string>>& pairs);

struct CellComparison {
  CellAddress old_address;
  CellAddress new_address;
  Value old_value;
  Value new_value;
  bool passed = false;
};

struct ScenarioResult {
  std::string name;
  std::vector<CellComparison> cells;
  bool passed = true;
};

enum class RegressionStatus { Matches, Differs, Error };
/// "matches reference" / "differs from reference" / "error". A match only
/// says the new version agrees with the reference, not that either is right.
std::string_view regression_label(RegressionStatus s);

struct RegressionReport {
  RegressionStatus status = RegressionStatus::Matches;
  std::string error;
  Tolerance tolerance;
  std::string started_at;
  std::string finished_at;
  std::string reference_fingerprint;
  std::string candidate_fingerprint;
  /// Sorted by scenario name; cells sorted by old address.
  std::vector<ScenarioResult> scenarios;

  std::size_t cell_count() const;
  std::size_t mismatch_count() const;
};

struct Baseline {
  std::string fingerprint;
  std::string recorded_at;
  std::map<std::string, ValueMap> scenarios;
};

struct RegressOptions {
  std::string reference_fingerprint;  // computed when empty
  std::string candidate_fingerprint;  // computed when empty
  std::function<std::string()> clock = [] { return utc_timestamp(std::chrono::system_clock::now()); };
};

/// For each scenario: apply inputs as literals to copies of both versions
/// (new-side addresses through map), recalculate, compare every output
/// cell. Inputs naming a defined name resolve by name in each workbook.
RegressionReport run_regression(const Workbook& old_wb, const Workbook& new_wb,
                                const std::vector<Scenario>& scenarios, const std::vector<RangeRef>& outputs,
                                const CorrespondenceMap& map, const Tolerance& tol,
                                const RegressOptions& opts = {});

/// Throws std::invalid_argument when a target does not resolve.
Baseline record_baseline(const Workbook& wb, const std::vector<Scenario>& scenarios,
                         const std::vector<RangeRef>& outputs, const RegressOptions& opts = {});

/// Baseline values stand in for the old version. Every baseline scenario
/// needs a matching entry in scenarios for its inputs.
RegressionReport compare_to_baseline(const Workbook& wb, const Baseline& baseline,
                                     const std::vector<Scenario>& scenarios, const CorrespondenceMap& map,
                                     const Tolerance& tol, const RegressOptions& opts = {});

}  // namespace sheetcheck
