#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "sheetcheck/address.hpp"
#include "sheetcheck/engine.hpp"
#include "sheetcheck/formula.hpp"
#include "sheetcheck/workbook.hpp"

using namespace sheetcheck;

TEST_CASE("parse_address decodes A1 references") {
  CellAddress b3 = parse_address("B3", "S1");
  CHECK(b3.sheet == "S1");
  CHECK(b3.row == 3);
  CHECK(b3.col == 2);
  CHECK_FALSE(b3.row_absolute);
  CHECK_FALSE(b3.col_absolute);

  CellAddress aa = parse_address("Costs!$AA$10", "S1");
  CHECK(aa.sheet == "Costs");
  CHECK(aa.row == 10);
  CHECK(aa.col == 27);
  CHECK(aa.row_absolute);
  CHECK(aa.col_absolute);

  CellAddress x65 = parse_address("X65", "S1");
  CHECK(x65.sheet == "S1");
  CHECK(x65.row == 65);
  CHECK(x65.col == 24);

  CellAddress mixed = parse_address("$C7", "S1");
  CHECK(mixed.col_absolute);
  CHECK_FALSE(mixed.row_absolute);

  CellAddress quoted = parse_address("'Project Cashflows'!D31", "S1");
  CHECK(quoted.sheet == "Project Cashflows");
  CHECK(quoted.row == 31);
}

TEST_CASE("parse_address reports the offending position") {
  auto position_of = [](std::string_view text) -> std::size_t {
    try {
      parse_address(text, "S1");
    } catch (const AddressError& e) {
      return e.position();
    }
    FAIL("no error for " << text);
    return 0;
  };
  CHECK(position_of("B3x") == 2);
  CHECK(position_of("3B") == 0);
  CHECK(position_of("B0") <= 2);
  CHECK(position_of("") == 0);
  for (std::string_view bad : {"A", "A1:", "$", "A$", "XFE1", "A1048577", "Sheet!", "'unterminated!A1"}) {
    CHECK_THROWS_AS(parse_address(bad, "S1"), AddressError);
    CHECK(position_of(bad) <= bad.size());
  }
}

TEST_CASE("column letters use bijective base 26") {
  CHECK(column_number("A") == 1);
  CHECK(column_number("Z") == 26);
  CHECK(column_number("AA") == 27);
  CHECK(column_number("XFD") == kMaxCols);
  CHECK(column_number("XFE") == 0);
  CHECK(column_letters(27) == "AA");
  CHECK(column_letters(702) == "ZZ");
  CHECK(column_letters(703) == "AAA");
  for (int c = 1; c <= kMaxCols; ++c) REQUIRE(column_number(column_letters(c)) == c);
}

TEST_CASE("format/parse round trip over random addresses") {
  std::mt19937_64 rng(7);
  const char* sheets[] = {"S1", "Project Cashflows", "2024 Plan", "x_y"};
  for (int i = 0; i < 5000; ++i) {
    CellAddress a;
    a.sheet = sheets[rng() % 4];
    a.row = static_cast<std::int32_t>(1 + rng() % kMaxRows);
    a.col = static_cast<std::int32_t>(1 + rng() % kMaxCols);
    a.row_absolute = rng() % 2 == 0;
    a.col_absolute = rng() % 2 == 0;
    CellAddress back = parse_address(format_address(a), "other");
    REQUIRE(back == a);
  }
}

TEST_CASE("range_cells enumerates row-major") {
  auto texts = [](const RangeRef& r) {
    std::vector<std::string> out;
    for (const CellAddress& a : range_cells(r)) out.push_back(format_address(a, false));
    return out;
  };
  CHECK(texts(parse_range("A1:A1", "S")) == std::vector<std::string>{"A1"});
  CHECK(texts(parse_range("A1:B2", "S")) == std::vector<std::string>{"A1", "B1", "A2", "B2"});
  CHECK(range_cells(parse_range("D31:D1030", "S")).size() == 1000);
  // Corners in either order describe the same block.
  CHECK(texts(parse_range("B2:A1", "S")) == texts(parse_range("A1:B2", "S")));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    CellAddress a{"S", static_cast<std::int32_t>(1 + rng() % 40), static_cast<std::int32_t>(1 + rng() % 40), false, false};
    CellAddress b{"S", static_cast<std::int32_t>(1 + rng() % 40), static_cast<std::int32_t>(1 + rng() % 40), false, false};
    RangeRef r = make_range(a, b);
    REQUIRE(range_cells(r).size() ==
            static_cast<std::size_t>((r.end.row - r.start.row + 1) * (r.end.col - r.start.col + 1)));
  }
}

TEST_CASE("sheet names compare case-insensitively") {
  Workbook wb;
  wb.add_sheet("Inputs");
  CHECK_THROWS_AS(wb.add_sheet("INPUTS"), std::invalid_argument);
  CHECK_THROWS_AS(wb.add_sheet("bad-name"), std::invalid_argument);
  CHECK(wb.find_sheet("inputs") != nullptr);
  CHECK(same_location(parse_address("inputs!A1", ""), parse_address("INPUTS!$A$1", "")));
  CellSet set{parse_address("Inputs!A1", ""), parse_address("INPUTS!A1", "")};
  CHECK(set.size() == 1);
}

TEST_CASE("resolve_name") {
  Workbook wb;
  wb.add_sheet("S1");
  wb.define_name("Rate", parse_range("S1!C3", ""));
  RangeRef r = wb.resolve_name("rate");
  CHECK(format_range(r) == "S1!C3");
  CHECK(r.size() == 1);

  try {
    wb.resolve_name("Foo");
    FAIL("expected NameError");
  } catch (const NameError& e) {
    CHECK(e.kind() == ErrorKind::Name);
  }
  CHECK_THROWS_AS(wb.define_name("Bad", parse_range("Nowhere!A1", "")), std::invalid_argument);

  Workbook fixture = fixtures::load_sample("cashflow.wb");
  CHECK(format_range(fixture.resolve_name("WageInflation")) == "Inputs!B3");
  CHECK(format_range(fixture.resolve_name("ConstructionTotal")) == "Checks!X68");
}

TEST_CASE("fill_range shifts relative references") {
  Workbook wb = fixtures::workbook("[sheet S1]\nA1 = 1\nA2 = 2\nA3 = 3\nB2 = =A2+1\nD2 = =$A$1+A2\nE2 = =A1\n");
  const CellAddress b2 = parse_address("B2", "S1");

  Workbook filled = fill_range(wb, b2, parse_range("B3:B3", "S1"));
  CHECK(filled.cell(parse_address("B3", "S1"))->as_formula().source == "=A3+1");

  filled = fill_range(wb, parse_address("D2", "S1"), parse_range("E3", "S1"));
  CHECK(filled.cell(parse_address("E3", "S1"))->as_formula().source == "=$A$1+B3");

  filled = fill_range(wb, parse_address("E2", "S1"), parse_range("E1", "S1"));
  ValueMap values = recalculate(filled);
  const Value& e1 = values.at(parse_address("E1", "S1"));
  REQUIRE(e1.is_error());
  CHECK(e1.as_error() == ErrorKind::Ref);

  // Literals are copied unchanged.
  filled = fill_range(wb, parse_address("A1", "S1"), parse_range("C1:C3", "S1"));
  CHECK(filled.cell(parse_address("C3", "S1"))->as_literal().as_number() == 1.0);

  CHECK_THROWS_AS(fill_range(wb, parse_address("Z9", "S1"), parse_range("A1", "S1")), std::invalid_argument);
}

TEST_CASE("fill_range is position-equivariant") {
  Workbook wb = fixtures::workbook(
      "[sheet S1]\nC5 = =SUM(A1:B$2)+$D3*Other!E4-IF(F$6>0,G7,$H$8)\n[sheet Other]\nE4 = 1\n");
  const CellAddress src = parse_address("C5", "S1");
  const AstPtr ast = wb.cell(src)->as_formula().ast;
  Workbook filled = fill_range(wb, src, parse_range("A1:F12", "S1"));
  for (const CellAddress& t : range_cells(parse_range("A1:F12", "S1"))) {
    const AstPtr expected = shift_references(ast, t.row - src.row, t.col - src.col);
    const Cell* cell = filled.cell(t);
    REQUIRE(cell != nullptr);
    REQUIRE(cell->is_formula());
    CHECK(*cell->as_formula().ast == *expected);
  }
}
