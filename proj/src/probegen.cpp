#include "sheetcheck/probegen.hpp"

#include <cmath>
#include <stdexcept>

namespace sheetcheck {

std::pair<std::int32_t, std::int32_t> SentinelGrid::decode(double value) const {
  const auto v = static_cast<std::int32_t>(value);
  return {v / base(), v % base()};
}

SentinelGrid lookup_sentinels(std::int32_t rows, std::int32_t cols, bool extended) {
  const std::int32_t limit = extended ? 99 : 9;
  if (rows < 1 || rows > limit || cols < 1 || cols > limit) {
    throw std::out_of_range("sentinel grid must be between 1x1 and " + std::to_string(limit) + "x" +
                            std::to_string(limit));
  }
  SentinelGrid g{rows, cols, extended, {}};
  g.values.reserve(static_cast<std::size_t>(rows * cols));
  for (std::int32_t r = 1; r <= rows; ++r) {
    for (std::int32_t c = 1; c <= cols; ++c) g.values.push_back(static_cast<double>(g.base() * r + c));
  }
  return g;
}

std::vector<double> one_hot(std::int32_t length, std::int32_t hot_index, double hot_value, double cold_value) {
  if (length < 1) throw std::out_of_range("one-hot length must be positive");
  if (hot_index < 1 || hot_index > length) {
    throw std::out_of_range("hot index " + std::to_string(hot_index) + " outside 1.." + std::to_string(length));
  }
  std::vector<double> v(static_cast<std::size_t>(length), cold_value);
  v[static_cast<std::size_t>(hot_index - 1)] = hot_value;
  return v;
}

std::optional<BoundaryKind> parse_boundary_kind(std::string_view text) {
  std::string key = sheet_key(text);
  if (key == "RATE") return BoundaryKind::Rate;
  if (key == "COUNT") return BoundaryKind::Count;
  if (key == "AMOUNT") return BoundaryKind::Amount;
  return std::nullopt;
}

std::vector<double> boundary_values(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Rate: return {0.0, 0.0001, -0.0001, 1.0};
    case BoundaryKind::Count: return {0.0, 1.0};
    case BoundaryKind::Amount: return {0.0, 1.0, -1.0};
  }
  return {};
}

std::vector<double> boundary_values(std::string_view kind) {
  auto parsed = parse_boundary_kind(kind);
  if (!parsed) throw std::invalid_argument("unknown boundary kind '" + std::string(kind) + "'");
  return boundary_values(*parsed);
}

std::string_view branch_kind_name(BranchKind k) {
  switch (k) {
    case BranchKind::If: return "IF";
    case BranchKind::Min: return "MIN";
    case BranchKind::Max: return "MAX";
  }
  return "IF";
}

std::vector<BranchPoint> list_branch_points(const Workbook& wb) {
  std::vector<BranchPoint> out;
  for (const Sheet& sheet : wb.sheets()) {
    for (const auto& [pos, cell] : sheet.cells()) {
      if (!cell.is_formula()) continue;
      const CellAddress here{sheet.name(), pos.first, pos.second, false, false};
      visit(*cell.as_formula().ast, [&](const Ast& n) {
        const auto* call = std::get_if<CallNode>(&n.node);
        if (call == nullptr) return;
        if (call->function == "IF") {
          out.push_back({here, BranchKind::If, call->args.size()});
        } else if (call->function == "MIN") {
          out.push_back({here, BranchKind::Min, call->args.size()});
        } else if (call->function == "MAX") {
          out.push_back({here, BranchKind::Max, call->args.size()});
        }
      });
    }
  }
  return out;
}

std::string sentinel_fragment(const SentinelGrid& grid, const CellAddress& anchor) {
  std::string out;
  for (std::int32_t r = 1; r <= grid.rows; ++r) {
    for (std::int32_t c = 1; c <= grid.cols; ++c) {
      CellAddress a{anchor.sheet, anchor.row + r - 1, anchor.col + c - 1, false, false};
      out += format_address(a, false) + " = " + format_number(grid.at(r, c)) + "\n";
    }
  }
  return out;
}

std::string column_fragment(const std::vector<double>& values, const CellAddress& anchor) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    CellAddress a{anchor.sheet, anchor.row + static_cast<std::int32_t>(i), anchor.col, false, false};
    out += format_address(a, false) + " = " + format_number(values[i]) + "\n";
  }
  return out;
}

}  // namespace sheetcheck
