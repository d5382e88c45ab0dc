#include "sheetcheck/textio.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

namespace sheetcheck {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && sheet_key(s.substr(0, prefix.size())) == sheet_key(prefix);
}

struct PendingName {
  std::string name;
  std::string ref;
  std::string default_sheet;
  std::size_t line;
};

}  // namespace

FileFormatError::FileFormatError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

std::string format_literal(const Value& v) {
  if (v.is_text()) {
    std::string out = "\"";
    for (char c : v.as_text()) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }
  return display_text(v);
}

Value parse_literal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty cell content");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw std::invalid_argument("unterminated text");
    std::string out;
    std::string_view body = text.substr(1, text.size() - 2);
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') {
        if (i + 1 >= body.size() || body[i + 1] != '"') throw std::invalid_argument("stray quote in text");
        ++i;
      }
      out += body[i];
    }
    return Value::text(std::move(out));
  }
  const std::string upper = sheet_key(text);
  if (upper == "TRUE") return Value::boolean(true);
  if (upper == "FALSE") return Value::boolean(false);
  if (text.front() == '#') {
    if (auto kind = parse_error_code(text)) return Value::error(*kind);
    throw std::invalid_argument("unknown error literal '" + std::string(text) + "'");
  }
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(x)) {
    throw std::invalid_argument("invalid number '" + std::string(text) + "'");
  }
  return Value::number(x);
}

Workbook parse_workbook(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  Workbook wb;
  std::string current;
  std::vector<PendingName> names;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](const std::string& message) -> FileFormatError {
      return FileFormatError(source, line_no, message);
    };

    if (line.front() == '[') {
      if (line.back() != ']') throw fail("missing ']'");
      std::string_view inner = trim(line.substr(1, line.size() - 2));
      if (starts_with_ci(inner, "sheet ")) {
        std::string name(trim(inner.substr(6)));
        try {
          wb.add_sheet(name);
        } catch (const std::exception& e) {
          throw fail(e.what());
        }
        current = name;
      } else if (starts_with_ci(inner, "name ")) {
        std::string_view rest = inner.substr(5);
        auto eq = rest.find('=');
        if (eq == std::string_view::npos) throw fail("expected '=' in name definition");
        names.push_back(PendingName{std::string(trim(rest.substr(0, eq))), std::string(trim(rest.substr(eq + 1))),
                                    current, line_no});
      } else {
        throw fail("unknown directive '" + std::string(inner) + "'");
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected '<cell> = <content>'");
    if (current.empty()) throw fail("cell before any [sheet] header");
    std::string_view ref = trim(line.substr(0, eq));
    std::string_view content = trim(line.substr(eq + 1));
    CellAddress addr;
    try {
      addr = parse_address(ref, current);
    } catch (const AddressError& e) {
      throw fail(e.what());
    }
    if (!same_sheet(addr.sheet, current) || addr.row_absolute || addr.col_absolute) {
      throw fail("cell address must be a plain reference on the current sheet");
    }
    addr.sheet = current;
    if (wb.cell(addr) != nullptr) throw fail("duplicate cell " + std::string(ref));
    if (content.empty()) throw fail("missing cell content");
    try {
      if (content.front() == '=') {
        wb.set_formula(addr, content);
      } else {
        wb.set_value(addr, parse_literal(content));
      }
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }

  for (const PendingName& n : names) {
    try {
      if (n.default_sheet.empty() && n.ref.find('!') == std::string::npos) {
        throw std::invalid_argument("name reference needs a sheet");
      }
      wb.define_name(n.name, parse_range(n.ref, n.default_sheet));
    } catch (const std::exception& e) {
      throw FileFormatError(source, n.line, e.what());
    }
  }
  return wb;
}

std::string to_text(const Workbook& wb) {
  std::string out;
  for (const auto& [key, def] : wb.names()) {
    out += "[name " + def.name + " = " + format_range(def.range) + "]\n";
  }
  for (const Sheet& sheet : wb.sheets()) {
    if (!out.empty()) out += '\n';
    out += "[sheet " + sheet.name() + "]\n";
    for (const auto& [pos, cell] : sheet.cells()) {
      out += column_letters(pos.second) + std::to_string(pos.first) + " = ";
      out += cell.is_formula() ? format_formula(*cell.as_formula().ast, sheet.name()) : format_literal(cell.as_literal());
      out += '\n';
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

LoadedWorkbook load_workbook(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return LoadedWorkbook{parse_workbook(bytes, path.string()), sha256_hex(bytes)};
}

void save_workbook(const Workbook& wb, const std::filesystem::path& path) { write_file(path, to_text(wb)); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0x0f];
  }
  return out;
}

std::string fingerprint(const Workbook& wb) { return sha256_hex(to_text(wb)); }

}  // namespace sheetcheck
