#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sheetcheck/address.hpp"
#include "sheetcheck/formula.hpp"
#include "sheetcheck/value.hpp"

namespace sheetcheck {

struct FormulaCell {
  std::string source;
  AstPtr ast;

  bool operator==(const FormulaCell& other) const {
    return source == other.source && *ast == *other.ast;
  }
};

struct Cell {
  std::variant<Value, FormulaCell> content;

  static Cell literal(Value v) { return Cell{std::move(v)}; }
  static Cell formula(std::string source, AstPtr ast) {
    return Cell{FormulaCell{std::move(source), std::move(ast)}};
  }

  bool is_formula() const { return std::holds_alternative<FormulaCell>(content); }
  const FormulaCell& as_formula() const { return std::get<FormulaCell>(content); }
  const Value& as_literal() const { return std::get<Value>(content); }

  bool operator==(const Cell&) const = default;
};

/// Sparse grid keyed by (row, col); iteration is row-major.
class Sheet {
 public:
  using Grid = std::map<std::pair<std::int32_t, std::int32_t>, Cell>;

  explicit Sheet(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const Grid& cells() const { return cells_; }

  const Cell* find(std::int32_t row, std::int32_t col) const;
  void set(std::int32_t row, std::int32_t col, Cell cell);
  void erase(std::int32_t row, std::int32_t col);

 private:
  std::string name_;
  Grid cells_;
};

struct DefinedName {
  std::string name;  // as declared
  RangeRef range;
};

/// Raised when a name lookup fails; carries ErrorKind::Name semantics.
class NameError : public std::runtime_error {
 public:
  explicit NameError(const std::string& name);
  ErrorKind kind() const { return ErrorKind::Name; }
};

class Workbook {
 public:
  Sheet& add_sheet(std::string name);
  const Sheet* find_sheet(std::string_view name) const;
  Sheet* find_sheet(std::string_view name);
  const std::vector<Sheet>& sheets() const { return sheets_; }
  /// Name of the first sheet, or "" for an empty workbook.
  std::string default_sheet() const;

  /// Workbook-scoped; names compare case-insensitively. The range's sheet
  /// must already exist.
  void define_name(std::string name, RangeRef range);
  std::optional<RangeRef> find_name(std::string_view name) const;
  /// Throws NameError for undefined names.
  RangeRef resolve_name(std::string_view name) const;
  /// Keyed by the uppercased name, so iteration order is canonical.
  const std::map<std::string, DefinedName>& names() const { return names_; }

  /// nullptr for blank cells and unknown sheets.
  const Cell* cell(const CellAddress& a) const;
  /// Throws std::out_of_range when the sheet does not exist.
  void set_cell(const CellAddress& a, Cell cell);
  /// Blank erases the cell.
  void set_value(const CellAddress& a, Value v);
  /// Parses with the address's sheet as the default sheet.
  void set_formula(const CellAddress& a, std::string_view text);
  void erase_cell(const CellAddress& a);

  bool operator==(const Workbook& other) const;

 private:
  Sheet& sheet_for(const CellAddress& a);

  std::vector<Sheet> sheets_;
  std::map<std::string, DefinedName> names_;
};

bool is_valid_identifier(std::string_view name);

/// Resolves a cell, range or defined name as written in test documents.
/// Unqualified references land on the workbook's first sheet. Throws
/// NameError or AddressError.
RangeRef resolve_target(const Workbook& wb, std::string_view target);

/// Copies the cell at source into every cell of target, shifting relative
/// references by the offset from source. Throws std::invalid_argument when
/// source is blank.
Workbook fill_range(Workbook wb, const CellAddress& source, const RangeRef& target);

}  // namespace sheetcheck
