#include "sheetcheck/formula.hpp"

namespace sheetcheck {

namespace {

constexpr int kPrecComparison = 1;
constexpr int kPrecConcat = 2;
constexpr int kPrecAdditive = 3;
constexpr int kPrecMultiplicative = 4;
constexpr int kPrecPower = 5;
constexpr int kPrecNegate = 6;
constexpr int kPrecPercent = 7;
constexpr int kPrecAtom = 8;

int binary_precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub: return kPrecAdditive;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kPrecMultiplicative;
    case BinaryOp::Pow: return kPrecPower;
    case BinaryOp::Concat: return kPrecConcat;
    default: return kPrecComparison;
  }
}

int precedence(const Ast& n) {
  if (const auto* b = std::get_if<BinaryNode>(&n.node)) return binary_precedence(b->op);
  if (const auto* u = std::get_if<UnaryNode>(&n.node)) {
    return u->op == UnaryOp::Negate ? kPrecNegate : kPrecPercent;
  }
  return kPrecAtom;
}

class Printer {
 public:
  explicit Printer(std::string_view home_sheet) : home_(home_sheet) {}

  void print(const Ast& n) { std::visit([this](const auto& node) { emit(node); }, n.node); }
  std::string take() { return std::move(out_); }

 private:
  void child(const Ast& n, bool parens) {
    if (parens) out_ += '(';
    print(n);
    if (parens) out_ += ')';
  }

  void address(const CellAddress& a) {
    out_ += format_address(a, home_.empty() || !same_sheet(a.sheet, home_));
  }

  void emit(const NumberNode& n) { out_ += format_number(n.value); }
  void emit(const TextNode& n) {
    out_ += '"';
    for (char c : n.value) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }
  void emit(const BoolNode& n) { out_ += n.value ? "TRUE" : "FALSE"; }
  void emit(const ErrorNode& n) { out_ += error_code(n.kind); }
  void emit(const RefNode& n) { address(n.address); }
  void emit(const RangeNode& n) {
    // Always two corners so the text re-parses as a range.
    address(n.range.start);
    out_ += ':';
    out_ += format_address(n.range.end, false);
  }
  void emit(const NameNode& n) { out_ += n.name; }
  void emit(const UnaryNode& n) {
    if (n.op == UnaryOp::Negate) {
      out_ += '-';
      child(*n.operand, precedence(*n.operand) < kPrecNegate);
    } else {
      // A bare number would be folded by the lexer ("5%" -> 0.05).
      bool parens = precedence(*n.operand) < kPrecPercent ||
                    std::holds_alternative<NumberNode>(n.operand->node);
      child(*n.operand, parens);
      out_ += '%';
    }
  }
  void emit(const BinaryNode& n) {
    const int prec = binary_precedence(n.op);
    const int lp = precedence(*n.lhs);
    const int rp = precedence(*n.rhs);
    if (n.op == BinaryOp::Pow) {
      child(*n.lhs, lp <= prec);
      out_ += binary_op_text(n.op);
      child(*n.rhs, rp < prec);
    } else {
      child(*n.lhs, lp < prec);
      out_ += binary_op_text(n.op);
      child(*n.rhs, rp <= prec);
    }
  }
  void emit(const CallNode& n) {
    out_ += n.function;
    out_ += '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i > 0) out_ += ',';
      print(*n.args[i]);
    }
    out_ += ')';
  }

  std::string_view home_;
  std::string out_;
};

}  // namespace

std::string_view binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    case BinaryOp::Concat: return "&";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

std::string format_expression(const Ast& ast, std::string_view home_sheet) {
  Printer p(home_sheet);
  p.print(ast);
  return p.take();
}

std::string format_formula(const Ast& ast, std::string_view home_sheet) {
  return "=" + format_expression(ast, home_sheet);
}

}  // namespace sheetcheck
