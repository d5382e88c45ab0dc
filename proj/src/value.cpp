#include "sheetcheck/value.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <utility>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace sheetcheck {

namespace {

struct ErrorSpelling {
  ErrorKind kind;
  std::string_view code;
  std::string_view name;
};

constexpr std::array<ErrorSpelling, 6> kErrors{{
    {ErrorKind::Div0, "#DIV/0!", "DIV0"},
    {ErrorKind::NA, "#N/A", "NA"},
    {ErrorKind::Value, "#VALUE!", "VALUE"},
    {ErrorKind::Ref, "#REF!", "REF"},
    {ErrorKind::Name, "#NAME?", "NAME"},
    {ErrorKind::Cycle, "#CYCLE!", "CYCLE"},
}};

bool iequals_ascii(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i] >= 'a' && a[i] <= 'z' ? static_cast<char>(a[i] - 32) : a[i];
    char y = b[i] >= 'a' && b[i] <= 'z' ? static_cast<char>(b[i] - 32) : b[i];
    if (x != y) return false;
  }
  return true;
}

}  // namespace

std::string_view error_code(ErrorKind kind) {
  for (const auto& e : kErrors) {
    if (e.kind == kind) return e.code;
  }
  return "#VALUE!";
}

std::string_view error_name(ErrorKind kind) {
  for (const auto& e : kErrors) {
    if (e.kind == kind) return e.name;
  }
  return "VALUE";
}

std::optional<ErrorKind> parse_error_code(std::string_view text) {
  for (const auto& e : kErrors) {
    if (iequals_ascii(e.code, text)) return e.kind;
  }
  return std::nullopt;
}

std::optional<ErrorKind> parse_error_name(std::string_view text) {
  for (const auto& e : kErrors) {
    if (iequals_ascii(e.name, text)) return e.kind;
  }
  return std::nullopt;
}

Value Value::number(double x) {
  if (!std::isfinite(x)) return error(ErrorKind::Value);
  return Value(Storage(x));
}

bool bit_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    return std::bit_cast<std::uint64_t>(a.as_number()) == std::bit_cast<std::uint64_t>(b.as_number());
  }
  return a == b;
}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), result.ptr);
}

std::string display_text(const Value& v) {
  struct Visitor {
    std::string operator()(const Blank&) const { return {}; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(const Error& e) const { return std::string(error_code(e.kind)); }
  };
  return std::visit(Visitor{}, v.storage());
}

std::string fold_case(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      out.append(utf8.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(i - start)));
      continue;
    }
    UChar32 folded = u_foldCase(c, U_FOLD_CASE_DEFAULT);
    std::array<std::uint8_t, 4> enc{};
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(enc.data(), n, 4, folded, error);
    if (error) continue;
    out.append(reinterpret_cast<const char*>(enc.data()), static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace sheetcheck
