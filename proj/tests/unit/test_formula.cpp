#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "random_ast.hpp"
#include "sheetcheck/engine.hpp"
#include "sheetcheck/formula.hpp"
#include "sheetcheck/workbook.hpp"

using namespace sheetcheck;

namespace {

std::vector<TokenKind> kinds(std::string_view text) {
  std::vector<TokenKind> out;
  for (const Token& t : tokenize(text)) out.push_back(t.kind);
  return out;
}

double evaluate(std::string_view text) {
  Workbook wb;
  wb.add_sheet("S1");
  EvalContext ctx(wb);
  Value v = eval(*parse_formula(text, "S1"), ctx);
  REQUIRE(v.is_number());
  return v.as_number();
}

}  // namespace

TEST_CASE("tokenize") {
  std::vector<Token> t = tokenize("=1+2");
  REQUIRE(t.size() == 4);
  CHECK(t[0].kind == TokenKind::Number);
  CHECK(t[0].number == 1.0);
  CHECK(t[1].kind == TokenKind::Plus);
  CHECK(t[2].number == 2.0);
  CHECK(t[3].kind == TokenKind::End);

  t = tokenize("\"Pass\"");
  REQUIRE(t.size() == 2);
  CHECK(t[0].kind == TokenKind::String);
  CHECK(t[0].text == "Pass");

  t = tokenize("0%");
  REQUIRE(t.size() == 2);
  CHECK(t[0].kind == TokenKind::Number);
  CHECK(t[0].number == 0.0);

  CHECK(tokenize("\"say \"\"hi\"\"\"")[0].text == "say \"hi\"");
  CHECK(tokenize("1.5e3")[0].number == 1500.0);
  CHECK(tokenize("50%")[0].number == 0.5);

  CHECK(kinds("'Project Cashflows'!$D$31:D1030") ==
        std::vector<TokenKind>{TokenKind::QuotedSheet, TokenKind::Bang, TokenKind::CellRef, TokenKind::Colon,
                               TokenKind::CellRef, TokenKind::End});
  CHECK(kinds("A1<>B1<=C1>=D1") ==
        std::vector<TokenKind>{TokenKind::CellRef, TokenKind::NotEqual, TokenKind::CellRef, TokenKind::LessEqual,
                               TokenKind::CellRef, TokenKind::GreaterEqual, TokenKind::CellRef, TokenKind::End});
  CHECK(kinds("#N/A") == std::vector<TokenKind>{TokenKind::ErrorLiteral, TokenKind::End});
}

TEST_CASE("lexer and parser error positions stay within the text") {
  auto position_of = [](std::string_view text) -> std::size_t {
    try {
      parse_formula(text, "S1");
    } catch (const FormulaError& e) {
      return e.position();
    }
    FAIL("no error for " << text);
    return 0;
  };
  CHECK(position_of("=\"abc") == 1);
  CHECK(position_of("=1+@") == 3);
  CHECK(position_of("=1+") == 3);
  CHECK(position_of("=(1+2") == 5);
  CHECK(position_of("=1 2") == 3);

  const std::vector<std::string> bad = {"",        "=",         "=)",      "=1+*2",     "=SUM(1,",  "=A1:",
                                        "=A1:B",   "='x",       "='x'",    "=#BOGUS",   "=1..2",    "=SUM(1,,2)",
                                        "=\"",     "=Sheet!",    "=1e",     "=$",        "=A1:Other!B2", "=(((",
                                        "=IF(1;2)", "=1 +",     "={1}",    "=[1]"};
  for (const std::string& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_formula(text, "S1"), FormulaError);
    CHECK(position_of(text) <= text.size());
  }

  // Random byte strings either parse or fail with an in-range position.
  std::mt19937_64 rng(3);
  const std::string alphabet = "=+-*/^&<>%(),:!$'\"#ABZaz019. _\t";
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) text += alphabet[rng() % alphabet.size()];
    try {
      parse_formula(text, "S1");
    } catch (const FormulaError& e) {
      CAPTURE(text);
      REQUIRE(e.position() <= text.size());
    }
  }
}

TEST_CASE("parse_formula builds the expected trees") {
  AstPtr f = parse_formula("=IF(X65=X64,\"Pass\",\"Fail\")", "S1");
  AstPtr expected = ast::call("IF", {ast::binary(BinaryOp::Eq, ast::ref(parse_address("X65", "S1")),
                                                 ast::ref(parse_address("X64", "S1"))),
                                     ast::text("Pass"), ast::text("Fail")});
  CHECK(*f == *expected);

  f = parse_formula("=SUM('Project Cashflows'!D31:D1030)", "S1");
  expected = ast::call("SUM", {ast::range(parse_range("'Project Cashflows'!D31:D1030", ""))});
  CHECK(*f == *expected);

  CHECK(*parse_formula("=sum(A1)", "S1") == *parse_formula("=SUM(A1)", "S1"));
  CHECK(*parse_formula("=WageInflation", "S1") == *ast::name("WageInflation"));
  // Unknown functions parse; the evaluator rejects them.
  CHECK(std::holds_alternative<CallNode>(parse_formula("=FOO(1)", "S1")->node));
}

TEST_CASE("operator precedence and associativity") {
  CHECK(evaluate("=1+2*3") == 7.0);
  CHECK(evaluate("=(1+2)*3") == 9.0);
  CHECK(evaluate("=2^3^2") == 512.0);
  CHECK(evaluate("=1-2-3") == -4.0);
  CHECK(evaluate("=-2^2") == 4.0);
  CHECK(evaluate("=-5%") == -0.05);
  CHECK(evaluate("=2*-3") == -6.0);
  CHECK(evaluate("=10%%") == doctest::Approx(0.001));

  AstPtr cmp = parse_formula("=1&2=\"12\"", "S1");
  const auto* top = std::get_if<BinaryNode>(&cmp->node);
  REQUIRE(top != nullptr);
  CHECK(top->op == BinaryOp::Eq);
}

TEST_CASE("format_formula prints minimal parentheses") {
  using namespace ast;
  CHECK(format_formula(*binary(BinaryOp::Add, number(1), binary(BinaryOp::Mul, number(2), number(3)))) == "=1+2*3");
  CHECK(format_formula(*binary(BinaryOp::Mul, binary(BinaryOp::Add, number(1), number(2)), number(3))) ==
        "=(1+2)*3");
  CHECK(format_formula(*binary(BinaryOp::Sub, number(1), binary(BinaryOp::Sub, number(2), number(3)))) ==
        "=1-(2-3)");
  CHECK(format_formula(*binary(BinaryOp::Pow, binary(BinaryOp::Pow, number(2), number(3)), number(2))) ==
        "=(2^3)^2");
  CHECK(format_formula(*binary(BinaryOp::Pow, number(2), binary(BinaryOp::Pow, number(3), number(2)))) ==
        "=2^3^2");
  CHECK(format_formula(*parse_formula("=sum( a1 : b2 )", "S1"), "S1") == "=SUM(A1:B2)");
  CHECK(format_formula(*parse_formula("='Project Cashflows'!D31", "S1"), "S1") == "='Project Cashflows'!D31");
  CHECK(format_formula(*parse_formula("=D31", "Project Cashflows"), "") == "='Project Cashflows'!D31");
  CHECK(format_formula(*text("say \"hi\"")) == "=\"say \"\"hi\"\"\"");
}

TEST_CASE("parse/format/parse round trip over the formula corpus") {
  const std::vector<std::string> corpus = randast::formula_corpus();
  CHECK(corpus.size() >= 200);
  for (const std::string& text : corpus) {
    CAPTURE(text);
    AstPtr first = parse_formula(text, randast::kHome);
    const std::string printed = format_formula(*first, randast::kHome);
    AstPtr second = parse_formula(printed, randast::kHome);
    REQUIRE(*first == *second);
    // Printing is idempotent.
    CHECK(format_formula(*second, randast::kHome) == printed);
    // Fully qualified printing parses back from any default sheet.
    CHECK(*parse_formula(format_formula(*first), "Elsewhere") == *first);
  }
}

TEST_CASE("parse(format(ast)) == ast for random trees") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 3000; ++i) {
    AstPtr tree = randast::random_ast(rng, 5);
    const std::string text = format_formula(*tree, randast::kHome);
    CAPTURE(text);
    REQUIRE(*parse_formula(text, randast::kHome) == *tree);
  }
}

TEST_CASE("references") {
  Workbook wb;
  wb.add_sheet("S1");
  wb.define_name("WageInflation", parse_range("S1!C3", ""));
  auto refs = [&](std::string_view text) {
    std::vector<std::string> out;
    for (const CellAddress& a : references(*parse_formula(text, "S1"), wb)) out.push_back(format_address(a));
    return out;
  };
  CHECK(refs("=A1+B2") == std::vector<std::string>{"S1!A1", "S1!B2"});
  CHECK(refs("=SUM(A1:A3)") == std::vector<std::string>{"S1!A1", "S1!A2", "S1!A3"});
  CHECK(refs("=WageInflation*2") == std::vector<std::string>{"S1!C3"});
  CHECK(refs("=Undefined*2").empty());
  CHECK(refs("=1+2").empty());
  CHECK(refs("=A1+$A$1").size() == 1);
}

TEST_CASE("references is monotone over subtrees") {
  Workbook wb;
  wb.add_sheet("Sheet1");
  wb.add_sheet("Inputs");
  wb.define_name("WageInflation", parse_range("Inputs!B3", ""));
  wb.define_name("x", parse_range("Sheet1!A1:B3", ""));
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    AstPtr tree = randast::random_ast(rng, 4);
    // Keep ranges small so the property runs quickly.
    bool big = false;
    visit(*tree, [&](const Ast& n) {
      if (const auto* r = std::get_if<RangeNode>(&n.node)) big = big || r->range.size() > 5000;
    });
    if (big) continue;
    const CellSet whole = references(*tree, wb);
    visit(*tree, [&](const Ast& sub) {
      for (const CellAddress& a : references(sub, wb)) REQUIRE(whole.count(a) == 1);
    });
  }
}

TEST_CASE("shift_references") {
  AstPtr f = parse_formula("=A1+$B$2+C$3+$D4", "S1");
  CHECK(format_formula(*shift_references(f, 2, 1), "S1") == "=B3+$B$2+D$3+$D6");
  AstPtr off = shift_references(parse_formula("=A1", "S1"), -1, 0);
  CHECK(*off == *ast::error(ErrorKind::Ref));
  // Absolute references never move, even at the grid edge.
  CHECK(*shift_references(parse_formula("=$A$1", "S1"), -5, -5) == *parse_formula("=$A$1", "S1"));
}
