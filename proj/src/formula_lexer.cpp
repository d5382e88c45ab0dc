#include <cctype>
#include <charconv>

#include "sheetcheck/formula.hpp"

namespace sheetcheck {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

enum class WordShape { Ident, CellRef, BadRef };

// Classifies an identifier-like run: `$?letters$?digits` with an in-range
// column is a cell reference; any other run containing '$' is malformed.
WordShape classify_word(std::string_view w) {
  std::size_t i = 0;
  if (i < w.size() && w[i] == '$') ++i;
  std::size_t letters_begin = i;
  while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) ++i;
  std::size_t letters_end = i;
  if (i < w.size() && w[i] == '$') ++i;
  std::size_t digits_begin = i;
  while (i < w.size() && is_digit(w[i])) ++i;
  bool pattern = letters_end > letters_begin && i > digits_begin && i == w.size();
  if (pattern) {
    std::int32_t col = column_number(w.substr(letters_begin, letters_end - letters_begin));
    if (col != 0) {
      std::string_view digits = w.substr(digits_begin);
      if (digits.size() > 7) return WordShape::BadRef;
      std::int32_t row = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), row);
      if (row < 1 || row > kMaxRows) return WordShape::BadRef;
      return WordShape::CellRef;
    }
  }
  if (w.find('$') != std::string_view::npos) return WordShape::BadRef;
  return WordShape::Ident;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '=') ++pos_;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{TokenKind::End, {}, 0.0, text_.size()});
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Token simple(TokenKind kind, std::size_t length) {
    Token t{kind, std::string(text_.substr(pos_, length)), 0.0, pos_};
    pos_ += length;
    return t;
  }

  Token next() {
    const char c = text_[pos_];
    const char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    if (is_digit(c) || (c == '.' && is_digit(n))) return number();
    if (c == '"') return string();
    if (c == '\'') return quoted_sheet();
    if (c == '#') return error_literal();
    if (is_ident_start(c)) return word();
    switch (c) {
      case '+': return simple(TokenKind::Plus, 1);
      case '-': return simple(TokenKind::Minus, 1);
      case '*': return simple(TokenKind::Star, 1);
      case '/': return simple(TokenKind::Slash, 1);
      case '^': return simple(TokenKind::Caret, 1);
      case '&': return simple(TokenKind::Ampersand, 1);
      case '=': return simple(TokenKind::Equal, 1);
      case '%': return simple(TokenKind::Percent, 1);
      case '(': return simple(TokenKind::LParen, 1);
      case ')': return simple(TokenKind::RParen, 1);
      case ',': return simple(TokenKind::Comma, 1);
      case ':': return simple(TokenKind::Colon, 1);
      case '!': return simple(TokenKind::Bang, 1);
      case '<':
        if (n == '>') return simple(TokenKind::NotEqual, 2);
        if (n == '=') return simple(TokenKind::LessEqual, 2);
        return simple(TokenKind::Less, 1);
      case '>':
        if (n == '=') return simple(TokenKind::GreaterEqual, 2);
        return simple(TokenKind::Greater, 1);
      default:
        break;
    }
    throw FormulaError("illegal character '" + std::string(1, c) + "'", pos_);
  }

  Token number() {
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && is_digit(text_[look])) {
        pos_ = look;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    std::string_view spelling = text_.substr(begin, pos_ - begin);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), value);
    if (ec != std::errc() || ptr != spelling.data() + spelling.size()) {
      throw FormulaError("malformed number '" + std::string(spelling) + "'", begin);
    }
    if (pos_ < text_.size() && text_[pos_] == '%') {
      ++pos_;
      value /= 100.0;
    }
    return Token{TokenKind::Number, std::string(text_.substr(begin, pos_ - begin)), value, begin};
  }

  Token string() {
    const std::size_t begin = pos_;
    std::string value;
    ++pos_;
    for (;;) {
      if (pos_ >= text_.size()) throw FormulaError("unterminated string", begin);
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          value.push_back('"');
          ++pos_;
          continue;
        }
        break;
      }
      value.push_back(c);
    }
    return Token{TokenKind::String, std::move(value), 0.0, begin};
  }

  Token quoted_sheet() {
    const std::size_t begin = pos_;
    std::size_t close = text_.find('\'', pos_ + 1);
    if (close == std::string_view::npos) throw FormulaError("unterminated sheet name", begin);
    std::string name(text_.substr(pos_ + 1, close - pos_ - 1));
    if (!is_valid_sheet_name(name)) throw FormulaError("invalid sheet name '" + name + "'", begin + 1);
    pos_ = close + 1;
    return Token{TokenKind::QuotedSheet, std::move(name), 0.0, begin};
  }

  Token error_literal() {
    const std::size_t begin = pos_;
    for (ErrorKind kind : {ErrorKind::Div0, ErrorKind::NA, ErrorKind::Value, ErrorKind::Ref,
                           ErrorKind::Name, ErrorKind::Cycle}) {
      std::string_view code = error_code(kind);
      if (parse_error_code(text_.substr(pos_, code.size())) == kind) {
        pos_ += code.size();
        return Token{TokenKind::ErrorLiteral, std::string(code), 0.0, begin};
      }
    }
    throw FormulaError("unknown error literal", begin);
  }

  Token word() {
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string_view w = text_.substr(begin, pos_ - begin);
    switch (classify_word(w)) {
      case WordShape::CellRef: return Token{TokenKind::CellRef, std::string(w), 0.0, begin};
      case WordShape::Ident: return Token{TokenKind::Ident, std::string(w), 0.0, begin};
      case WordShape::BadRef: break;
    }
    throw FormulaError("malformed reference '" + std::string(w) + "'", begin);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaError::FormulaError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Ident: return "identifier";
    case TokenKind::CellRef: return "cell reference";
    case TokenKind::QuotedSheet: return "quoted sheet name";
    case TokenKind::ErrorLiteral: return "error literal";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Caret: return "'^'";
    case TokenKind::Ampersand: return "'&'";
    case TokenKind::Equal: return "'='";
    case TokenKind::NotEqual: return "'<>'";
    case TokenKind::Less: return "'<'";
    case TokenKind::LessEqual: return "'<='";
    case TokenKind::Greater: return "'>'";
    case TokenKind::GreaterEqual: return "'>='";
    case TokenKind::Percent: return "'%'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Bang: return "'!'";
    case TokenKind::End: return "end of formula";
  }
  return "token";
}

}  // namespace sheetcheck
