#include "sheetcheck/address.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace sheetcheck {

namespace {

bool is_sheet_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ' ';
}

[[noreturn]] void fail(const std::string& what, std::string_view text, std::size_t pos) {
  throw AddressError("invalid reference '" + std::string(text) + "': " + what + " at position " +
                         std::to_string(pos),
                     pos);
}

// Cursor over reference text; offsets are reported relative to the full text.
struct Scanner {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }
};

std::string scan_sheet_prefix(Scanner& s) {
  if (s.peek() == '\'') {
    std::size_t close = s.text.find('\'', s.pos + 1);
    if (close == std::string_view::npos) fail("unterminated sheet quote", s.text, s.text.size());
    std::string name(s.text.substr(s.pos + 1, close - s.pos - 1));
    if (name.empty()) fail("empty sheet name", s.text, s.pos + 1);
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (!is_sheet_char(name[i])) fail("illegal sheet name character", s.text, s.pos + 1 + i);
    }
    if (close + 1 >= s.text.size() || s.text[close + 1] != '!') {
      fail("expected '!' after quoted sheet name", s.text, close + 1);
    }
    s.pos = close + 2;
    return name;
  }
  std::size_t bang = s.text.find('!', s.pos);
  if (bang == std::string_view::npos) return {};
  std::string name(s.text.substr(s.pos, bang - s.pos));
  if (name.empty()) fail("empty sheet name", s.text, s.pos);
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (!is_sheet_char(name[i]) || name[i] == ' ') {
      fail("illegal sheet name character", s.text, s.pos + i);
    }
  }
  s.pos = bang + 1;
  return name;
}

CellAddress scan_cell(Scanner& s, std::string sheet) {
  CellAddress a;
  a.sheet = std::move(sheet);
  if (s.peek() == '$') {
    a.col_absolute = true;
    ++s.pos;
  }
  std::size_t letters_begin = s.pos;
  while (!s.done() && std::isalpha(static_cast<unsigned char>(s.peek()))) ++s.pos;
  if (s.pos == letters_begin) fail("expected column letters", s.text, s.pos);
  if (s.pos - letters_begin > 3) fail("column out of range", s.text, letters_begin);
  a.col = column_number(s.text.substr(letters_begin, s.pos - letters_begin));
  if (a.col == 0) fail("column out of range", s.text, letters_begin);
  if (s.peek() == '$') {
    a.row_absolute = true;
    ++s.pos;
  }
  std::size_t digits_begin = s.pos;
  std::int64_t row = 0;
  while (!s.done() && std::isdigit(static_cast<unsigned char>(s.peek()))) {
    row = row * 10 + (s.peek() - '0');
    if (row > kMaxRows) fail("row out of range", s.text, digits_begin);
    ++s.pos;
  }
  if (s.pos == digits_begin) fail("expected row digits", s.text, s.pos);
  if (row < 1) fail("row out of range", s.text, digits_begin);
  a.row = static_cast<std::int32_t>(row);
  return a;
}

}  // namespace

AddressError::AddressError(const std::string& message, std::size_t position)
    : std::runtime_error(message), position_(position) {}

bool RangeRef::contains(const CellAddress& a) const {
  return same_sheet(a.sheet, start.sheet) && a.row >= start.row && a.row <= end.row &&
         a.col >= start.col && a.col <= end.col;
}

namespace {

// Sheet names are restricted to ASCII, so case folding stays local.
inline char ascii_upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }

}  // namespace

std::string sheet_key(std::string_view sheet) {
  std::string key(sheet);
  for (char& c : key) c = ascii_upper(c);
  return key;
}

bool same_sheet(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i] && ascii_upper(a[i]) != ascii_upper(b[i])) return false;
  }
  return true;
}

bool is_valid_sheet_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), is_sheet_char);
}

bool LocationLess::operator()(const CellAddress& a, const CellAddress& b) const {
  if (a.sheet != b.sheet) {
    const std::size_t n = std::min(a.sheet.size(), b.sheet.size());
    for (std::size_t i = 0; i < n; ++i) {
      const char x = ascii_upper(a.sheet[i]);
      const char y = ascii_upper(b.sheet[i]);
      if (x != y) return static_cast<unsigned char>(x) < static_cast<unsigned char>(y);
    }
    if (a.sheet.size() != b.sheet.size()) return a.sheet.size() < b.sheet.size();
  }
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

bool same_location(const CellAddress& a, const CellAddress& b) {
  return a.row == b.row && a.col == b.col && same_sheet(a.sheet, b.sheet);
}

std::string column_letters(std::int32_t col) {
  std::string out;
  while (col > 0) {
    int rem = (col - 1) % 26;
    out.push_back(static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::int32_t column_number(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return 0;
  std::int32_t col = 0;
  for (char c : letters) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return 0;
    col = col * 26 + (std::toupper(static_cast<unsigned char>(c)) - 'A' + 1);
  }
  return col <= kMaxCols ? col : 0;
}

CellAddress parse_address(std::string_view text, std::string_view default_sheet) {
  Scanner s{text};
  std::string sheet = scan_sheet_prefix(s);
  CellAddress a = scan_cell(s, sheet.empty() ? std::string(default_sheet) : std::move(sheet));
  if (!s.done()) fail("unexpected character", text, s.pos);
  return a;
}

RangeRef parse_range(std::string_view text, std::string_view default_sheet) {
  Scanner s{text};
  std::string sheet = scan_sheet_prefix(s);
  if (sheet.empty()) sheet = std::string(default_sheet);
  CellAddress first = scan_cell(s, sheet);
  if (s.done()) return single_cell_range(first);
  if (s.peek() != ':') fail("unexpected character", text, s.pos);
  ++s.pos;
  CellAddress second = scan_cell(s, sheet);
  if (!s.done()) fail("unexpected character", text, s.pos);
  return make_range(first, second);
}

RangeRef make_range(const CellAddress& a, const CellAddress& b) {
  RangeRef r{a, b};
  r.end.sheet = a.sheet;
  if (r.start.row > r.end.row) {
    std::swap(r.start.row, r.end.row);
    std::swap(r.start.row_absolute, r.end.row_absolute);
  }
  if (r.start.col > r.end.col) {
    std::swap(r.start.col, r.end.col);
    std::swap(r.start.col_absolute, r.end.col_absolute);
  }
  return r;
}

RangeRef single_cell_range(const CellAddress& a) { return RangeRef{a, a}; }

std::string format_sheet_prefix(std::string_view sheet) {
  bool quote = sheet.empty() || std::isdigit(static_cast<unsigned char>(sheet.front())) ||
               sheet.find(' ') != std::string_view::npos;
  std::string out;
  if (quote) {
    out.reserve(sheet.size() + 3);
    out += '\'';
    out += sheet;
    out += "'!";
  } else {
    out.reserve(sheet.size() + 1);
    out += sheet;
    out += '!';
  }
  return out;
}

std::string format_address(const CellAddress& a, bool with_sheet) {
  std::string out;
  if (with_sheet) out = format_sheet_prefix(a.sheet);
  if (a.col_absolute) out += '$';
  out += column_letters(a.col);
  if (a.row_absolute) out += '$';
  out += std::to_string(a.row);
  return out;
}

std::string format_range(const RangeRef& r, bool with_sheet) {
  std::string out = format_address(r.start, with_sheet);
  if (r.start.row != r.end.row || r.start.col != r.end.col ||
      r.start.row_absolute != r.end.row_absolute || r.start.col_absolute != r.end.col_absolute) {
    out += ':';
    out += format_address(r.end, false);
  }
  return out;
}

std::vector<CellAddress> range_cells(const RangeRef& r) {
  std::vector<CellAddress> cells;
  cells.reserve(r.size());
  for (std::int32_t row = r.start.row; row <= r.end.row; ++row) {
    for (std::int32_t col = r.start.col; col <= r.end.col; ++col) {
      cells.push_back(CellAddress{r.start.sheet, row, col, false, false});
    }
  }
  return cells;
}

}  // namespace sheetcheck
