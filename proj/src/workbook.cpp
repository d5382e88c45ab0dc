#include "sheetcheck/workbook.hpp"

#include <cctype>

namespace sheetcheck {

namespace {

bool looks_like_cell_ref(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i == s.size()) return false;
  std::size_t letters = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  return i == s.size() && column_number(s.substr(0, letters)) != 0;
}

}  // namespace

const Cell* Sheet::find(std::int32_t row, std::int32_t col) const {
  auto it = cells_.find({row, col});
  return it == cells_.end() ? nullptr : &it->second;
}

void Sheet::set(std::int32_t row, std::int32_t col, Cell cell) {
  cells_.insert_or_assign({row, col}, std::move(cell));
}

void Sheet::erase(std::int32_t row, std::int32_t col) { cells_.erase({row, col}); }

NameError::NameError(const std::string& name) : std::runtime_error("undefined name '" + name + "'") {}

Sheet& Workbook::add_sheet(std::string name) {
  if (!is_valid_sheet_name(name)) throw std::invalid_argument("invalid sheet name '" + name + "'");
  if (find_sheet(name) != nullptr) throw std::invalid_argument("duplicate sheet '" + name + "'");
  return sheets_.emplace_back(std::move(name));
}

const Sheet* Workbook::find_sheet(std::string_view name) const {
  for (const Sheet& s : sheets_) {
    if (same_sheet(s.name(), name)) return &s;
  }
  return nullptr;
}

Sheet* Workbook::find_sheet(std::string_view name) {
  for (Sheet& s : sheets_) {
    if (same_sheet(s.name(), name)) return &s;
  }
  return nullptr;
}

std::string Workbook::default_sheet() const {
  return sheets_.empty() ? std::string() : sheets_.front().name();
}

void Workbook::define_name(std::string name, RangeRef range) {
  if (!is_valid_identifier(name)) throw std::invalid_argument("invalid name '" + name + "'");
  if (find_sheet(range.start.sheet) == nullptr) {
    throw std::invalid_argument("name '" + name + "' refers to unknown sheet '" + range.start.sheet +
                                "'");
  }
  std::string key = sheet_key(name);
  names_.insert_or_assign(std::move(key), DefinedName{std::move(name), std::move(range)});
}

std::optional<RangeRef> Workbook::find_name(std::string_view name) const {
  auto it = names_.find(sheet_key(name));
  if (it == names_.end()) return std::nullopt;
  return it->second.range;
}

RangeRef Workbook::resolve_name(std::string_view name) const {
  auto found = find_name(name);
  if (!found) throw NameError(std::string(name));
  return *found;
}

const Cell* Workbook::cell(const CellAddress& a) const {
  const Sheet* s = find_sheet(a.sheet);
  return s == nullptr ? nullptr : s->find(a.row, a.col);
}

Sheet& Workbook::sheet_for(const CellAddress& a) {
  Sheet* s = find_sheet(a.sheet);
  if (s == nullptr) throw std::out_of_range("unknown sheet '" + a.sheet + "'");
  return *s;
}

void Workbook::set_cell(const CellAddress& a, Cell cell) { sheet_for(a).set(a.row, a.col, std::move(cell)); }

void Workbook::set_value(const CellAddress& a, Value v) {
  if (v.is_blank()) {
    erase_cell(a);
    return;
  }
  set_cell(a, Cell::literal(std::move(v)));
}

void Workbook::set_formula(const CellAddress& a, std::string_view text) {
  Sheet& s = sheet_for(a);
  AstPtr parsed = parse_formula(text, s.name());
  std::string source(text);
  if (source.empty() || source.front() != '=') source.insert(source.begin(), '=');
  s.set(a.row, a.col, Cell::formula(std::move(source), std::move(parsed)));
}

void Workbook::erase_cell(const CellAddress& a) {
  if (Sheet* s = find_sheet(a.sheet)) s->erase(a.row, a.col);
}

bool Workbook::operator==(const Workbook& other) const {
  if (sheets_.size() != other.sheets_.size() || names_.size() != other.names_.size()) return false;
  for (std::size_t i = 0; i < sheets_.size(); ++i) {
    if (sheets_[i].name() != other.sheets_[i].name()) return false;
    if (sheets_[i].cells() != other.sheets_[i].cells()) return false;
  }
  auto it = other.names_.begin();
  for (const auto& [key, def] : names_) {
    if (key != it->first || def.name != it->second.name || def.range != it->second.range) return false;
    ++it;
  }
  return true;
}

bool is_valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name.front())) && name.front() != '_') return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  }
  std::string upper = sheet_key(name);
  if (upper == "TRUE" || upper == "FALSE") return false;
  return !looks_like_cell_ref(name);
}

RangeRef resolve_target(const Workbook& wb, std::string_view target) {
  if (is_valid_identifier(target)) return wb.resolve_name(target);
  return parse_range(target, wb.default_sheet());
}

Workbook fill_range(Workbook wb, const CellAddress& source, const RangeRef& target) {
  const Cell* src = wb.cell(source);
  if (src == nullptr) {
    throw std::invalid_argument("fill source " + format_address(source) + " is blank");
  }
  const Cell original = *src;
  const Sheet* target_sheet = wb.find_sheet(target.start.sheet);
  if (target_sheet == nullptr) throw std::out_of_range("unknown sheet '" + target.start.sheet + "'");
  const std::string target_name = target_sheet->name();
  for (const CellAddress& t : range_cells(target)) {
    if (!original.is_formula()) {
      wb.set_cell(t, original);
      continue;
    }
    AstPtr shifted = shift_references(original.as_formula().ast, t.row - source.row, t.col - source.col,
                                      source.sheet, target_name);
    std::string text = format_formula(*shifted, target_name);
    wb.set_cell(t, Cell::formula(std::move(text), std::move(shifted)));
  }
  return wb;
}

}  // namespace sheetcheck
