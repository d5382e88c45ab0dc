#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sheetcheck {

inline constexpr std::int32_t kMaxRows = 1048576;
inline constexpr std::int32_t kMaxCols = 16384;

/// A single cell location. Rows and columns are 1-based; the absolute flags
/// only matter when a formula is copied to another position.
struct CellAddress {
  std::string sheet;
  std::int32_t row = 1;
  std::int32_t col = 1;
  bool row_absolute = false;
  bool col_absolute = false;

  bool operator==(const CellAddress&) const = default;
};

/// Rectangular block on one sheet, normalized so start is the top-left corner.
struct RangeRef {
  CellAddress start;
  CellAddress end;

  std::int32_t rows() const { return end.row - start.row + 1; }
  std::int32_t cols() const { return end.col - start.col + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols());
  }
  bool contains(const CellAddress& a) const;

  bool operator==(const RangeRef&) const = default;
};

/// Thrown for malformed reference text. position indexes the offending
/// character in the input.
class AddressError : public std::runtime_error {
 public:
  AddressError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Sheet names compare case-insensitively. They are restricted to
// [A-Za-z0-9_ ] so ASCII folding is sufficient.
std::string sheet_key(std::string_view sheet);
bool same_sheet(std::string_view a, std::string_view b);
bool is_valid_sheet_name(std::string_view name);

/// Orders addresses by (sheet, row, col) ignoring the absolute flags and
/// sheet-name case. Used for every address-keyed container.
struct LocationLess {
  bool operator()(const CellAddress& a, const CellAddress& b) const;
};
bool same_location(const CellAddress& a, const CellAddress& b);

using CellSet = std::set<CellAddress, LocationLess>;

std::string column_letters(std::int32_t col);
/// Decodes bijective base-26 letters (A=1, Z=26, AA=27). Returns 0 when the
/// letters are empty, not alphabetic, or beyond kMaxCols.
std::int32_t column_number(std::string_view letters);

CellAddress parse_address(std::string_view text, std::string_view default_sheet);
/// Accepts `A1:B2` or a single address (a one-cell range).
RangeRef parse_range(std::string_view text, std::string_view default_sheet);

/// Builds a range from two corners on the same sheet, swapping components
/// as needed so start is top-left.
RangeRef make_range(const CellAddress& a, const CellAddress& b);
RangeRef single_cell_range(const CellAddress& a);

/// Sheet prefix is written when with_sheet is set; names containing spaces
/// (or that could be mistaken for something else) are quoted.
std::string format_address(const CellAddress& a, bool with_sheet = true);
std::string format_range(const RangeRef& r, bool with_sheet = true);
std::string format_sheet_prefix(std::string_view sheet);

/// Row-major enumeration of every address in the range.
std::vector<CellAddress> range_cells(const RangeRef& r);

}  // namespace sheetcheck
