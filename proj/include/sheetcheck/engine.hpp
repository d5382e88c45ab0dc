#pragma once

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "sheetcheck/address.hpp"
#include "sheetcheck/formula.hpp"
#include "sheetcheck/value.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

using ValueMap = std::map<CellAddress, Value, LocationLess>;

/// Formula cells and the cells they read, decomposed into strongly
/// connected components. A view over the workbook it was built from, which
/// must outlive it.
class DependencyGraph {
 public:
  const std::vector<CellAddress>& formula_cells() const { return cells_; }
  /// Every cell a formula cell reads (its references()); empty for anything
  /// else.
  CellSet precedents(const CellAddress& a) const;
  /// Formula cells among the precedents: the graph's edges.
  std::vector<CellAddress> formula_precedents(const CellAddress& a) const;
  /// Components in evaluation order: every component comes after the
  /// components holding its precedents.
  const std::vector<std::vector<CellAddress>>& components() const { return components_; }
  /// True for members of a multi-cell component or a self-referencing cell.
  bool in_cycle(const CellAddress& a) const;

 private:
  friend DependencyGraph build_graph(const Workbook& wb);

  const Workbook* wb_ = nullptr;
  std::vector<CellAddress> cells_;
  std::vector<const Ast*> asts_;
  std::map<CellAddress, std::size_t, LocationLess> index_;
  std::vector<std::vector<std::size_t>> edges_;
  std::vector<std::vector<CellAddress>> components_;
  std::vector<bool> cyclic_;
};

DependencyGraph build_graph(const Workbook& wb);

/// Workbook plus the values computed so far.
class EvalContext {
 public:
  explicit EvalContext(const Workbook& wb) : wb_(&wb) {}

  const Workbook& workbook() const { return *wb_; }

  /// Computed value, else the literal, else Blank. Unknown sheets read as
  /// Error(REF).
  Value lookup(const CellAddress& a) const;
  void store(const CellAddress& a, Value v);
  const ValueMap& computed() const { return computed_; }

 private:
  const Workbook* wb_;
  ValueMap computed_;
};

/// Evaluates an expression against ctx. Failures come back as error values.
Value eval(const Ast& ast, const EvalContext& ctx);

/// Values of every non-blank cell after evaluating formulas in dependency
/// order. Cells on a cycle evaluate to Error(CYCLE).
ValueMap recalculate(const Workbook& wb);

/// Fully recalculated context, for evaluating ad-hoc expressions against
/// the workbook.
EvalContext recalculated_context(const Workbook& wb);

/// Ordering used by comparison operators: Number < Text < Bool, text
/// compared after case folding, Blank read as the other side's empty value.
/// Neither side may be an error.
int compare_values(const Value& a, const Value& b);

bool is_builtin(std::string_view function);
const std::vector<std::string_view>& builtin_functions();

}  // namespace sheetcheck
