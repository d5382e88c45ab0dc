#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetcheck/address.hpp"
#include "sheetcheck/value.hpp"

namespace sheetcheck {

class Workbook;

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind {
  Number,
  String,
  Ident,
  CellRef,
  QuotedSheet,
  ErrorLiteral,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Ampersand,
  Equal,
  NotEqual,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
  Percent,
  LParen,
  RParen,
  Comma,
  Colon,
  Bang,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;     // unescaped for strings, raw spelling otherwise
  double number = 0.0;  // Number tokens only
  std::size_t position = 0;
};

/// Lexing or parsing failure. position is a byte offset into the formula
/// text, always within [0, text.size()].
class FormulaError : public std::runtime_error {
 public:
  FormulaError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A leading '=' is skipped. Numbers with a '%' suffix are scaled by 1/100.
/// The token list always ends with an End token.
std::vector<Token> tokenize(std::string_view text);

std::string_view token_kind_name(TokenKind kind);

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

enum class UnaryOp { Negate, Percent };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };

struct NumberNode {
  double value;
  bool operator==(const NumberNode&) const = default;
};
struct TextNode {
  std::string value;
  bool operator==(const TextNode&) const = default;
};
struct BoolNode {
  bool value;
  bool operator==(const BoolNode&) const = default;
};
/// Produced when a copied reference falls off the grid.
struct ErrorNode {
  ErrorKind kind;
  bool operator==(const ErrorNode&) const = default;
};
struct RefNode {
  CellAddress address;
  bool operator==(const RefNode&) const = default;
};
struct RangeNode {
  RangeRef range;
  bool operator==(const RangeNode&) const = default;
};
struct NameNode {
  std::string name;
  bool operator==(const NameNode&) const = default;
};
struct UnaryNode {
  UnaryOp op;
  AstPtr operand;
  bool operator==(const UnaryNode& other) const;
};
struct BinaryNode {
  BinaryOp op;
  AstPtr lhs;
  AstPtr rhs;
  bool operator==(const BinaryNode& other) const;
};
struct CallNode {
  std::string function;  // uppercase
  std::vector<AstPtr> args;
  bool operator==(const CallNode& other) const;
};

/// Immutable expression tree; subtrees are shared between copies.
struct Ast {
  using Node = std::variant<NumberNode, TextNode, BoolNode, ErrorNode, RefNode, RangeNode, NameNode,
                            UnaryNode, BinaryNode, CallNode>;
  Node node;

  bool operator==(const Ast& other) const { return node == other.node; }
};

namespace ast {
AstPtr number(double value);
AstPtr text(std::string value);
AstPtr boolean(bool value);
AstPtr error(ErrorKind kind);
AstPtr ref(CellAddress address);
AstPtr range(RangeRef range);
AstPtr name(std::string name);
AstPtr unary(UnaryOp op, AstPtr operand);
AstPtr binary(BinaryOp op, AstPtr lhs, AstPtr rhs);
AstPtr call(std::string function, std::vector<AstPtr> args);
}  // namespace ast

std::string_view binary_op_text(BinaryOp op);

/// Parses formula text; unqualified references land on default_sheet.
/// Function names are uppercased; any identifier followed by '(' is a call
/// and unknown functions are left for the evaluator to reject.
AstPtr parse_formula(std::string_view text, std::string_view default_sheet);

/// Canonical text with a leading '=' and the minimum parentheses. References
/// on home_sheet are written without a sheet prefix; pass an empty
/// home_sheet to qualify every reference.
std::string format_formula(const Ast& ast, std::string_view home_sheet = {});
/// Same as format_formula without the leading '='.
std::string format_expression(const Ast& ast, std::string_view home_sheet = {});

/// Every cell the formula can read: single refs, all cells of ranges and of
/// defined names that resolve in wb. Unknown names contribute nothing.
CellSet references(const Ast& ast, const Workbook& wb);

/// Pre-order walk over every node.
void visit(const Ast& ast, const std::function<void(const Ast&)>& fn);

/// Shifts relative reference components by (drow, dcol). A reference that
/// would leave the grid becomes #REF!. References on from_sheet are moved to
/// to_sheet, matching how unqualified references follow a copied formula.
AstPtr shift_references(const AstPtr& ast, std::int32_t drow, std::int32_t dcol,
                        std::string_view from_sheet = {}, std::string_view to_sheet = {});

}  // namespace sheetcheck
