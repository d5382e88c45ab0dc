#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <unordered_map>

#include "eval_internal.hpp"

namespace sheetcheck {

// ---------------------------------------------------------------------------
// Dependency graph
// ---------------------------------------------------------------------------

CellSet DependencyGraph::precedents(const CellAddress& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return {};
  return references(*asts_[it->second], *wb_);
}

std::vector<CellAddress> DependencyGraph::formula_precedents(const CellAddress& a) const {
  std::vector<CellAddress> out;
  auto it = index_.find(a);
  if (it == index_.end()) return out;
  for (std::size_t j : edges_[it->second]) out.push_back(cells_[j]);
  return out;
}

bool DependencyGraph::in_cycle(const CellAddress& a) const {
  auto it = index_.find(a);
  return it != index_.end() && cyclic_[it->second];
}

namespace {

// Formula cells by (sheet position, row, col), for finding the formula
// cells inside a range without enumerating every address in it.
class FormulaIndex {
 public:
  explicit FormulaIndex(const Workbook& wb) : wb_(wb) {}

  void add(std::size_t sheet, std::int32_t row, std::int32_t col, std::size_t id) {
    ids_.emplace(key(sheet, row, col), id);
  }

  template <typename Fn>
  void for_each_in(const RangeRef& r, Fn&& fn) const {
    const std::size_t sheet = sheet_position(r.start.sheet);
    if (sheet == kNoSheet) return;
    const auto& grid = wb_.sheets()[sheet].cells();
    for (std::int32_t row = r.start.row; row <= r.end.row; ++row) {
      auto it = grid.lower_bound({row, r.start.col});
      if (it == grid.end()) break;
      if (it->first.first != row) {
        // Jump straight to the next populated row.
        row = it->first.first - 1;
        continue;
      }
      for (; it != grid.end() && it->first.first == row && it->first.second <= r.end.col; ++it) {
        if (!it->second.is_formula()) continue;
        fn(ids_.at(key(sheet, row, it->first.second)));
      }
    }
  }

 private:
  static constexpr std::size_t kNoSheet = static_cast<std::size_t>(-1);

  static std::uint64_t key(std::size_t sheet, std::int32_t row, std::int32_t col) {
    return (static_cast<std::uint64_t>(sheet) << 40) | (static_cast<std::uint64_t>(row) << 16) |
           static_cast<std::uint64_t>(col);
  }

  std::size_t sheet_position(std::string_view name) const {
    const auto& sheets = wb_.sheets();
    for (std::size_t i = 0; i < sheets.size(); ++i) {
      if (same_sheet(sheets[i].name(), name)) return i;
    }
    return kNoSheet;
  }

  const Workbook& wb_;
  std::unordered_map<std::uint64_t, std::size_t> ids_;
};

void collect_edges(const Ast& node, const Workbook& wb, const FormulaIndex& index, std::vector<std::size_t>& out) {
  auto add = [&](std::size_t id) { out.push_back(id); };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RefNode>) {
          index.for_each_in(single_cell_range(n.address), add);
        } else if constexpr (std::is_same_v<T, RangeNode>) {
          index.for_each_in(n.range, add);
        } else if constexpr (std::is_same_v<T, NameNode>) {
          if (auto found = wb.find_name(n.name)) index.for_each_in(*found, add);
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          collect_edges(*n.operand, wb, index, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect_edges(*n.lhs, wb, index, out);
          collect_edges(*n.rhs, wb, index, out);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          for (const auto& arg : n.args) collect_edges(*arg, wb, index, out);
        }
      },
      node.node);
}

}  // namespace

DependencyGraph build_graph(const Workbook& wb) {
  DependencyGraph g;
  g.wb_ = &wb;
  FormulaIndex index(wb);
  for (std::size_t s = 0; s < wb.sheets().size(); ++s) {
    const Sheet& sheet = wb.sheets()[s];
    for (const auto& [pos, cell] : sheet.cells()) {
      if (!cell.is_formula()) continue;
      CellAddress a{sheet.name(), pos.first, pos.second, false, false};
      index.add(s, pos.first, pos.second, g.cells_.size());
      g.index_.emplace_hint(g.index_.end(), a, g.cells_.size());
      g.cells_.push_back(std::move(a));
      g.asts_.push_back(cell.as_formula().ast.get());
    }
  }

  const std::size_t n = g.cells_.size();
  std::vector<std::vector<std::size_t>>& adj = g.edges_;
  adj.resize(n);
  std::vector<bool> self_loop(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    collect_edges(*g.asts_[i], wb, index, adj[i]);
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    self_loop[i] = std::binary_search(adj[i].begin(), adj[i].end(), i);
  }

  // Iterative Tarjan. Edges point from a cell to its precedents, so each
  // component is emitted after everything it reads: evaluation order.
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  std::vector<Frame> frames;
  std::size_t counter = 0;
  g.cyclic_.assign(n, false);

  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != kUnvisited) continue;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      const std::size_t v = f.node;
      if (f.edge == 0 && order[v] == kUnvisited) {
        order[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (f.edge < adj[v].size()) {
        const std::size_t w = adj[v][f.edge++];
        if (order[w] == kUnvisited) {
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
      if (low[v] != order[v]) continue;
      std::vector<CellAddress> component;
      std::vector<std::size_t> members;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        members.push_back(w);
      } while (w != v);
      const bool cyclic = members.size() > 1 || self_loop[v];
      std::sort(members.begin(), members.end());
      for (std::size_t m : members) {
        g.cyclic_[m] = cyclic;
        component.push_back(g.cells_[m]);
      }
      g.components_.push_back(std::move(component));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Value EvalContext::lookup(const CellAddress& a) const {
  if (auto it = computed_.find(a); it != computed_.end()) return it->second;
  const Sheet* sheet = wb_->find_sheet(a.sheet);
  if (sheet == nullptr) return Value::error(ErrorKind::Ref);
  const Cell* cell = sheet->find(a.row, a.col);
  if (cell == nullptr || cell->is_formula()) return Value::blank();
  return cell->as_literal();
}

void EvalContext::store(const CellAddress& a, Value v) { computed_.insert_or_assign(a, std::move(v)); }

int compare_values(const Value& a, const Value& b) {
  auto rank = [](const Value& v) { return v.is_number() ? 0 : v.is_text() ? 1 : 2; };
  if (a.is_blank() && b.is_blank()) return 0;
  if (a.is_blank()) {
    if (b.is_number()) return compare_values(Value::number(0.0), b);
    if (b.is_text()) return compare_values(Value::text(""), b);
    return compare_values(Value::boolean(false), b);
  }
  if (b.is_blank()) return -compare_values(b, a);
  if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
  if (a.is_number()) {
    double x = a.as_number();
    double y = b.as_number();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.is_text()) {
    int c = fold_case(a.as_text()).compare(fold_case(b.as_text()));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
}

namespace detail {

Value coerce_number(const Value& v) {
  if (v.is_number() || v.is_error()) return v;
  if (v.is_blank()) return Value::number(0.0);
  if (v.is_bool()) return Value::number(v.as_bool() ? 1.0 : 0.0);
  return Value::error(ErrorKind::Value);
}

Value coerce_bool(const Value& v) {
  if (v.is_bool() || v.is_error()) return v;
  if (v.is_blank()) return Value::boolean(false);
  if (v.is_number()) return Value::boolean(v.as_number() != 0.0);
  return Value::error(ErrorKind::Value);
}

bool for_each_present(const RangeRef& r, const EvalContext& ctx,
                      const std::function<bool(const Value&)>& fn) {
  const Sheet* sheet = ctx.workbook().find_sheet(r.start.sheet);
  if (sheet == nullptr) return false;
  const auto& grid = sheet->cells();
  for (std::int32_t row = r.start.row; row <= r.end.row; ++row) {
    auto it = grid.lower_bound({row, r.start.col});
    for (; it != grid.end() && it->first.first == row && it->first.second <= r.end.col; ++it) {
      Value v = it->second.is_formula()
                    ? ctx.lookup(CellAddress{sheet->name(), row, it->first.second, false, false})
                    : it->second.as_literal();
      if (!fn(v)) return true;
    }
    if (it == grid.end() && row < r.end.row) {
      // No later cells on this sheet.
      break;
    }
  }
  return true;
}

Operand eval_operand(const Ast& node, const EvalContext& ctx) {
  if (const auto* r = std::get_if<RefNode>(&node.node)) return single_cell_range(r->address);
  if (const auto* g = std::get_if<RangeNode>(&node.node)) return g->range;
  if (const auto* m = std::get_if<NameNode>(&node.node)) {
    if (auto found = ctx.workbook().find_name(m->name)) return *found;
    return Value::error(ErrorKind::Name);
  }
  return eval(node, ctx);
}

Value to_scalar(const Operand& op, const EvalContext& ctx) {
  if (const auto* v = std::get_if<Value>(&op)) return *v;
  const RangeRef& r = std::get<RangeRef>(op);
  if (r.size() != 1) return Value::error(ErrorKind::Value);
  return ctx.lookup(r.start);
}

Value eval_scalar(const Ast& node, const EvalContext& ctx) { return to_scalar(eval_operand(node, ctx), ctx); }

}  // namespace detail

namespace {

using detail::coerce_number;
using detail::eval_scalar;

Value arithmetic(BinaryOp op, double x, double y) {
  switch (op) {
    case BinaryOp::Add: return Value::number(x + y);
    case BinaryOp::Sub: return Value::number(x - y);
    case BinaryOp::Mul: return Value::number(x * y);
    case BinaryOp::Div:
      if (y == 0.0) return Value::error(ErrorKind::Div0);
      return Value::number(x / y);
    case BinaryOp::Pow:
      if (x == 0.0 && y < 0.0) return Value::error(ErrorKind::Div0);
      return Value::number(std::pow(x, y));
    default: break;
  }
  return Value::error(ErrorKind::Value);
}

Value eval_binary(const BinaryNode& b, const EvalContext& ctx) {
  Value lhs = eval_scalar(*b.lhs, ctx);
  if (lhs.is_error()) return lhs;
  Value rhs = eval_scalar(*b.rhs, ctx);
  if (rhs.is_error()) return rhs;
  switch (b.op) {
    case BinaryOp::Concat: return Value::text(display_text(lhs) + display_text(rhs));
    case BinaryOp::Eq: return Value::boolean(compare_values(lhs, rhs) == 0);
    case BinaryOp::Ne: return Value::boolean(compare_values(lhs, rhs) != 0);
    case BinaryOp::Lt: return Value::boolean(compare_values(lhs, rhs) < 0);
    case BinaryOp::Le: return Value::boolean(compare_values(lhs, rhs) <= 0);
    case BinaryOp::Gt: return Value::boolean(compare_values(lhs, rhs) > 0);
    case BinaryOp::Ge: return Value::boolean(compare_values(lhs, rhs) >= 0);
    default: break;
  }
  Value x = coerce_number(lhs);
  if (x.is_error()) return x;
  Value y = coerce_number(rhs);
  if (y.is_error()) return y;
  return arithmetic(b.op, x.as_number(), y.as_number());
}

Value eval_unary(const UnaryNode& u, const EvalContext& ctx) {
  Value x = coerce_number(eval_scalar(*u.operand, ctx));
  if (x.is_error()) return x;
  if (u.op == UnaryOp::Negate) return Value::number(-x.as_number());
  return Value::number(x.as_number() / 100.0);
}

}  // namespace

Value eval(const Ast& node, const EvalContext& ctx) {
  struct Visitor {
    const EvalContext& ctx;
    Value operator()(const NumberNode& n) const { return Value::number(n.value); }
    Value operator()(const TextNode& n) const { return Value::text(n.value); }
    Value operator()(const BoolNode& n) const { return Value::boolean(n.value); }
    Value operator()(const ErrorNode& n) const { return Value::error(n.kind); }
    Value operator()(const RefNode& n) const { return ctx.lookup(n.address); }
    Value operator()(const RangeNode& n) const { return detail::to_scalar(n.range, ctx); }
    Value operator()(const NameNode& n) const {
      auto found = ctx.workbook().find_name(n.name);
      if (!found) return Value::error(ErrorKind::Name);
      return detail::to_scalar(*found, ctx);
    }
    Value operator()(const UnaryNode& n) const { return eval_unary(n, ctx); }
    Value operator()(const BinaryNode& n) const { return eval_binary(n, ctx); }
    Value operator()(const CallNode& n) const { return detail::call_builtin(n, ctx); }
  };
  return std::visit(Visitor{ctx}, node.node);
}

EvalContext recalculated_context(const Workbook& wb) {
  DependencyGraph graph = build_graph(wb);
  EvalContext ctx(wb);
  for (const CellAddress& a : graph.formula_cells()) {
    if (graph.in_cycle(a)) ctx.store(a, Value::error(ErrorKind::Cycle));
  }
  for (const auto& component : graph.components()) {
    for (const CellAddress& a : component) {
      if (graph.in_cycle(a)) continue;
      const Cell* cell = wb.cell(a);
      ctx.store(a, eval(*cell->as_formula().ast, ctx));
    }
  }
  return ctx;
}

ValueMap recalculate(const Workbook& wb) {
  EvalContext ctx = recalculated_context(wb);
  ValueMap values = ctx.computed();
  for (const Sheet& sheet : wb.sheets()) {
    for (const auto& [pos, cell] : sheet.cells()) {
      if (cell.is_formula()) continue;
      values.emplace(CellAddress{sheet.name(), pos.first, pos.second, false, false}, cell.as_literal());
    }
  }
  return values;
}

}  // namespace sheetcheck
