#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sheetcheck/value.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

/// Line-level problem in a workbook or document file. The message is
/// prefixed with "source:line: ".
class FileFormatError : public std::runtime_error {
 public:
  FileFormatError(std::string source, std::size_t line, const std::string& message);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Workbook text format, one item per line:
//
//   # comment
//   [sheet Project Cashflows]
//   [name WageInflation = Inputs!C3]
//   A1 = 5
//   B1 = "text with ""quotes"""
//   C1 = =SUM(A1:B1)
//
// Cell lines belong to the most recent [sheet] header. Cell content is a
// formula (leading '='), quoted text, TRUE/FALSE, an error code such as
// #N/A, or a decimal number. CRLF line endings are accepted.

Workbook parse_workbook(std::string_view text, std::string_view source_name = "<input>");

/// Canonical form: names first (sorted case-insensitively), then each sheet
/// with its cells in row-major order, LF line endings, shortest round-trip
/// numbers and canonical formula text.
std::string to_text(const Workbook& wb);

std::string format_literal(const Value& v);
/// Parses literal cell content; throws std::invalid_argument.
Value parse_literal(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

struct LoadedWorkbook {
  Workbook workbook;
  /// Hash of the file bytes as read.
  std::string fingerprint;
};

LoadedWorkbook load_workbook(const std::filesystem::path& path);
void save_workbook(const Workbook& wb, const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
/// Hash of the canonical serialization.
std::string fingerprint(const Workbook& wb);

}  // namespace sheetcheck
