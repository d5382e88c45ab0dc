#include <cctype>

#include "sheetcheck/formula.hpp"
#include "sheetcheck/workbook.hpp"

namespace sheetcheck {

bool UnaryNode::operator==(const UnaryNode& other) const {
  return op == other.op && *operand == *other.operand;
}

bool BinaryNode::operator==(const BinaryNode& other) const {
  return op == other.op && *lhs == *other.lhs && *rhs == *other.rhs;
}

bool CallNode::operator==(const CallNode& other) const {
  if (function != other.function || args.size() != other.args.size()) return false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(*args[i] == *other.args[i])) return false;
  }
  return true;
}

namespace ast {
AstPtr number(double value) { return std::make_shared<const Ast>(Ast{NumberNode{value}}); }
AstPtr text(std::string value) { return std::make_shared<const Ast>(Ast{TextNode{std::move(value)}}); }
AstPtr boolean(bool value) { return std::make_shared<const Ast>(Ast{BoolNode{value}}); }
AstPtr error(ErrorKind kind) { return std::make_shared<const Ast>(Ast{ErrorNode{kind}}); }
AstPtr ref(CellAddress address) { return std::make_shared<const Ast>(Ast{RefNode{std::move(address)}}); }
AstPtr range(RangeRef range) { return std::make_shared<const Ast>(Ast{RangeNode{std::move(range)}}); }
AstPtr name(std::string name) { return std::make_shared<const Ast>(Ast{NameNode{std::move(name)}}); }
AstPtr unary(UnaryOp op, AstPtr operand) {
  return std::make_shared<const Ast>(Ast{UnaryNode{op, std::move(operand)}});
}
AstPtr binary(BinaryOp op, AstPtr lhs, AstPtr rhs) {
  return std::make_shared<const Ast>(Ast{BinaryNode{op, std::move(lhs), std::move(rhs)}});
}
AstPtr call(std::string function, std::vector<AstPtr> args) {
  for (char& c : function) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return std::make_shared<const Ast>(Ast{CallNode{std::move(function), std::move(args)}});
}
}  // namespace ast

namespace {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string_view default_sheet)
      : tokens_(std::move(tokens)), default_sheet_(default_sheet) {}

  AstPtr parse() {
    if (peek().kind == TokenKind::End) throw FormulaError("empty formula", peek().position);
    AstPtr result = comparison();
    if (peek().kind != TokenKind::End) unexpected();
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = index_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& advance() { return tokens_[index_ < tokens_.size() - 1 ? index_++ : index_]; }
  bool accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }
  void expect(TokenKind kind) {
    if (!accept(kind)) {
      throw FormulaError("expected " + std::string(token_kind_name(kind)) + " but found " +
                             std::string(token_kind_name(peek().kind)),
                         peek().position);
    }
  }
  [[noreturn]] void unexpected() const {
    throw FormulaError("unexpected " + std::string(token_kind_name(peek().kind)), peek().position);
  }

  AstPtr comparison() {
    AstPtr lhs = concatenation();
    for (;;) {
      BinaryOp op;
      switch (peek().kind) {
        case TokenKind::Equal: op = BinaryOp::Eq; break;
        case TokenKind::NotEqual: op = BinaryOp::Ne; break;
        case TokenKind::Less: op = BinaryOp::Lt; break;
        case TokenKind::LessEqual: op = BinaryOp::Le; break;
        case TokenKind::Greater: op = BinaryOp::Gt; break;
        case TokenKind::GreaterEqual: op = BinaryOp::Ge; break;
        default: return lhs;
      }
      advance();
      lhs = ast::binary(op, lhs, concatenation());
    }
  }

  AstPtr concatenation() {
    AstPtr lhs = additive();
    while (accept(TokenKind::Ampersand)) lhs = ast::binary(BinaryOp::Concat, lhs, additive());
    return lhs;
  }

  AstPtr additive() {
    AstPtr lhs = multiplicative();
    for (;;) {
      if (accept(TokenKind::Plus)) {
        lhs = ast::binary(BinaryOp::Add, lhs, multiplicative());
      } else if (accept(TokenKind::Minus)) {
        lhs = ast::binary(BinaryOp::Sub, lhs, multiplicative());
      } else {
        return lhs;
      }
    }
  }

  AstPtr multiplicative() {
    AstPtr lhs = power();
    for (;;) {
      if (accept(TokenKind::Star)) {
        lhs = ast::binary(BinaryOp::Mul, lhs, power());
      } else if (accept(TokenKind::Slash)) {
        lhs = ast::binary(BinaryOp::Div, lhs, power());
      } else {
        return lhs;
      }
    }
  }

  // Right-associative.
  AstPtr power() {
    AstPtr base = unary();
    if (accept(TokenKind::Caret)) return ast::binary(BinaryOp::Pow, base, power());
    return base;
  }

  AstPtr unary() {
    if (accept(TokenKind::Minus)) return ast::unary(UnaryOp::Negate, unary());
    if (accept(TokenKind::Plus)) return unary();
    return postfix();
  }

  AstPtr postfix() {
    AstPtr operand = primary();
    while (accept(TokenKind::Percent)) operand = ast::unary(UnaryOp::Percent, operand);
    return operand;
  }

  AstPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: advance(); return ast::number(t.number);
      case TokenKind::String: advance(); return ast::text(t.text);
      case TokenKind::ErrorLiteral: advance(); return ast::error(*parse_error_code(t.text));
      case TokenKind::LParen: {
        advance();
        AstPtr inner = comparison();
        expect(TokenKind::RParen);
        return inner;
      }
      case TokenKind::QuotedSheet: {
        advance();
        std::string sheet = t.text;
        expect(TokenKind::Bang);
        return reference(sheet);
      }
      case TokenKind::CellRef:
        if (peek(1).kind == TokenKind::Bang) return qualified_reference();
        return reference(std::string(default_sheet_));
      case TokenKind::Ident:
        if (peek(1).kind == TokenKind::Bang) return qualified_reference();
        if (peek(1).kind == TokenKind::LParen) return call();
        advance();
        if (sheet_key(t.text) == "TRUE") return ast::boolean(true);
        if (sheet_key(t.text) == "FALSE") return ast::boolean(false);
        return ast::name(t.text);
      default:
        unexpected();
    }
  }

  AstPtr qualified_reference() {
    const Token& sheet = advance();
    if (!is_valid_sheet_name(sheet.text)) {
      throw FormulaError("invalid sheet name '" + sheet.text + "'", sheet.position);
    }
    std::string name = sheet.text;
    expect(TokenKind::Bang);
    return reference(name);
  }

  CellAddress cell_address(const std::string& sheet) {
    const Token& t = peek();
    if (t.kind != TokenKind::CellRef) {
      throw FormulaError("expected cell reference but found " + std::string(token_kind_name(t.kind)),
                         t.position);
    }
    advance();
    try {
      return parse_address(t.text, sheet);
    } catch (const AddressError& e) {
      throw FormulaError(e.what(), t.position + e.position());
    }
  }

  AstPtr reference(const std::string& sheet) {
    CellAddress first = cell_address(sheet);
    if (!accept(TokenKind::Colon)) return ast::ref(std::move(first));
    CellAddress second = cell_address(sheet);
    return ast::range(make_range(first, second));
  }

  AstPtr call() {
    std::string function = advance().text;
    expect(TokenKind::LParen);
    std::vector<AstPtr> args;
    if (!accept(TokenKind::RParen)) {
      do {
        args.push_back(comparison());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RParen);
    }
    return ast::call(std::move(function), std::move(args));
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  std::string_view default_sheet_;
};

}  // namespace

AstPtr parse_formula(std::string_view text, std::string_view default_sheet) {
  return Parser(tokenize(text), default_sheet).parse();
}

void visit(const Ast& node, const std::function<void(const Ast&)>& fn) {
  fn(node);
  if (const auto* u = std::get_if<UnaryNode>(&node.node)) {
    visit(*u->operand, fn);
  } else if (const auto* b = std::get_if<BinaryNode>(&node.node)) {
    visit(*b->lhs, fn);
    visit(*b->rhs, fn);
  } else if (const auto* c = std::get_if<CallNode>(&node.node)) {
    for (const AstPtr& arg : c->args) visit(*arg, fn);
  }
}

CellSet references(const Ast& root, const Workbook& wb) {
  CellSet out;
  auto add_range = [&out](const RangeRef& r) {
    for (CellAddress& a : range_cells(r)) out.insert(std::move(a));
  };
  visit(root, [&](const Ast& n) {
    if (const auto* r = std::get_if<RefNode>(&n.node)) {
      CellAddress a = r->address;
      a.row_absolute = a.col_absolute = false;
      out.insert(std::move(a));
    } else if (const auto* g = std::get_if<RangeNode>(&n.node)) {
      add_range(g->range);
    } else if (const auto* m = std::get_if<NameNode>(&n.node)) {
      if (auto found = wb.find_name(m->name)) add_range(*found);
    }
  });
  return out;
}

namespace {

bool shift_address(CellAddress& a, std::int32_t drow, std::int32_t dcol, std::string_view from_sheet,
                   std::string_view to_sheet) {
  if (!a.row_absolute) a.row += drow;
  if (!a.col_absolute) a.col += dcol;
  if (!from_sheet.empty() && same_sheet(a.sheet, from_sheet)) a.sheet = std::string(to_sheet);
  return a.row >= 1 && a.row <= kMaxRows && a.col >= 1 && a.col <= kMaxCols;
}

}  // namespace

AstPtr shift_references(const AstPtr& root, std::int32_t drow, std::int32_t dcol,
                        std::string_view from_sheet, std::string_view to_sheet) {
  const Ast::Node& n = root->node;
  if (const auto* r = std::get_if<RefNode>(&n)) {
    CellAddress a = r->address;
    if (!shift_address(a, drow, dcol, from_sheet, to_sheet)) return ast::error(ErrorKind::Ref);
    return ast::ref(std::move(a));
  }
  if (const auto* g = std::get_if<RangeNode>(&n)) {
    CellAddress s = g->range.start;
    CellAddress e = g->range.end;
    if (!shift_address(s, drow, dcol, from_sheet, to_sheet) ||
        !shift_address(e, drow, dcol, from_sheet, to_sheet)) {
      return ast::error(ErrorKind::Ref);
    }
    return ast::range(make_range(s, e));
  }
  if (const auto* u = std::get_if<UnaryNode>(&n)) {
    return ast::unary(u->op, shift_references(u->operand, drow, dcol, from_sheet, to_sheet));
  }
  if (const auto* b = std::get_if<BinaryNode>(&n)) {
    return ast::binary(b->op, shift_references(b->lhs, drow, dcol, from_sheet, to_sheet),
                       shift_references(b->rhs, drow, dcol, from_sheet, to_sheet));
  }
  if (const auto* c = std::get_if<CallNode>(&n)) {
    std::vector<AstPtr> args;
    args.reserve(c->args.size());
    for (const AstPtr& arg : c->args) args.push_back(shift_references(arg, drow, dcol, from_sheet, to_sheet));
    return ast::call(c->function, std::move(args));
  }
  return root;
}

}  // namespace sheetcheck
