#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheetcheck/address.hpp"
#include "sheetcheck/value.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

/// Lookup-table probe where every value names its own position:
/// value(r, c) = 10r + c, or 100r + c with the extended encoding.
struct SentinelGrid {
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  bool extended = false;
  std::vector<double> values;  // row-major

  double at(std::int32_t row, std::int32_t col) const {
    return values[static_cast<std::size_t>((row - 1) * cols + (col - 1))];
  }
  std::int32_t base() const { return extended ? 100 : 10; }
  /// Inverse of the encoding: (value div base, value mod base).
  std::pair<std::int32_t, std::int32_t> decode(double value) const;
};

/// 1..9 per side by default; 1..99 with extended. Throws std::out_of_range.
SentinelGrid lookup_sentinels(std::int32_t rows, std::int32_t cols, bool extended = false);

/// hot_index is 1-based. Throws std::out_of_range.
std::vector<double> one_hot(std::int32_t length, std::int32_t hot_index, double hot_value = 1.0,
                            double cold_value = 0.0);

enum class BoundaryKind { Rate, Count, Amount };
std::optional<BoundaryKind> parse_boundary_kind(std::string_view text);
std::vector<double> boundary_values(BoundaryKind kind);
/// Throws std::invalid_argument for unknown kinds.
std::vector<double> boundary_values(std::string_view kind);

enum class BranchKind { If, Min, Max };
std::string_view branch_kind_name(BranchKind k);

struct BranchPoint {
  CellAddress address;
  BranchKind kind;
  std::size_t argument_count = 0;
};

/// One entry per IF/MIN/MAX call, ordered by sheet (workbook order), row,
/// column, then position in the formula.
std::vector<BranchPoint> list_branch_points(const Workbook& wb);

/// Workbook-format cell lines with the grid's top-left cell at anchor.
std::string sentinel_fragment(const SentinelGrid& grid, const CellAddress& anchor);
/// Values laid down a column from anchor.
std::string column_fragment(const std::vector<double>& values, const CellAddress& anchor);

}  // namespace sheetcheck
