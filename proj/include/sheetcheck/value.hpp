#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sheetcheck {

enum class ErrorKind { Div0, NA, Value, Ref, Name, Cycle };

/// Spreadsheet spelling, e.g. "#DIV/0!".
std::string_view error_code(ErrorKind kind);
/// Short identifier used in documents, e.g. "DIV0".
std::string_view error_name(ErrorKind kind);
std::optional<ErrorKind> parse_error_code(std::string_view text);
std::optional<ErrorKind> parse_error_name(std::string_view text);

struct Blank {
  bool operator==(const Blank&) const = default;
};

struct Error {
  ErrorKind kind;
  bool operator==(const Error&) const = default;
};

/// Cell value. Numbers are finite at rest: Value::number() turns NaN and
/// infinities into Error(VALUE).
class Value {
 public:
  using Storage = std::variant<Blank, double, std::string, bool, Error>;

  Value() = default;

  static Value blank() { return Value(); }
  static Value number(double x);
  static Value text(std::string s) { return Value(Storage(std::move(s))); }
  static Value boolean(bool b) { return Value(Storage(b)); }
  static Value error(ErrorKind kind) { return Value(Storage(Error{kind})); }

  bool is_blank() const { return std::holds_alternative<Blank>(data_); }
  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_text() const { return std::holds_alternative<std::string>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_error() const { return std::holds_alternative<Error>(data_); }

  double as_number() const { return std::get<double>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  ErrorKind as_error() const { return std::get<Error>(data_).kind; }

  const Storage& storage() const { return data_; }

  bool operator==(const Value&) const = default;

 private:
  explicit Value(Storage s) : data_(std::move(s)) {}
  Storage data_;
};

/// Same type and, for numbers, the same bit pattern.
bool bit_equal(const Value& a, const Value& b);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

/// Text as a cell would display it: numbers in shortest form, TRUE/FALSE,
/// error codes, blank as "".
std::string display_text(const Value& v);

/// Simple Unicode case folding of UTF-8 text. Invalid sequences pass
/// through byte-for-byte.
std::string fold_case(std::string_view utf8);

}  // namespace sheetcheck
