#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "fixtures.hpp"
#include "random_workbook.hpp"
#include "sheetcheck/engine.hpp"
#include "sheetcheck/textio.hpp"

using namespace sheetcheck;

namespace {

std::size_t error_line(std::string_view text) {
  try {
    parse_workbook(text, "book.wb");
  } catch (const FileFormatError& e) {
    CHECK(std::string(e.what()).rfind("book.wb:" + std::to_string(e.line()) + ": ", 0) == 0);
    return e.line();
  }
  FAIL("no error for: " << text);
  return 0;
}

}  // namespace

TEST_CASE("minimal workbook files") {
  Workbook wb = parse_workbook("[sheet S1]\nA1 = 5\n");
  REQUIRE(wb.sheets().size() == 1);
  const Cell* a1 = wb.cell(parse_address("S1!A1", ""));
  REQUIRE(a1 != nullptr);
  CHECK(a1->as_literal() == Value::number(5));

  wb = parse_workbook("[sheet S1]\nA1 = 1\nB1 = 2\nC1 = =SUM(A1:B1)\n");
  const Cell* c1 = wb.cell(parse_address("S1!C1", ""));
  REQUIRE(c1->is_formula());
  CHECK(c1->as_formula().source == "=SUM(A1:B1)");
  CHECK(recalculate(wb).at(parse_address("S1!C1", "")) == Value::number(3));

  wb = parse_workbook("[name WageInflation = S1!C3]\n[sheet S1]\nC3 = 0.05\n");
  CHECK(format_range(wb.resolve_name("WageInflation")) == "S1!C3");
  // Names may come before the sheet they point at.
  CHECK(wb.names().size() == 1);
}

TEST_CASE("literal content") {
  Workbook wb = parse_workbook(
      "# a comment\n"
      "[sheet Data Sheet]\n"
      "A1 = \"say \"\"hi\"\"\"\n"
      "A2 = TRUE\n"
      "A3 = false\n"
      "A4 = #N/A\n"
      "A5 = -1.5e-3\n"
      "A6 = \"\"\n"
      "\n"
      "  A7   =   7  \n");
  auto lit = [&](const char* a) { return wb.cell(parse_address(a, "Data Sheet"))->as_literal(); };
  CHECK(lit("A1") == Value::text("say \"hi\""));
  CHECK(lit("A2") == Value::boolean(true));
  CHECK(lit("A3") == Value::boolean(false));
  CHECK(lit("A4") == Value::error(ErrorKind::NA));
  CHECK(lit("A5") == Value::number(-0.0015));
  CHECK(lit("A6") == Value::text(""));
  CHECK(lit("A7") == Value::number(7));

  CHECK(parse_literal("1e3") == Value::number(1000));
  CHECK_THROWS_AS(parse_literal("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_literal("1e999"), std::invalid_argument);
  CHECK(format_literal(Value::text("a\"b")) == "\"a\"\"b\"");
  CHECK(format_literal(Value::number(0.1)) == "0.1");
  CHECK(format_literal(Value::error(ErrorKind::Div0)) == "#DIV/0!");
}

TEST_CASE("line-level errors carry file:line") {
  CHECK(error_line("A1 = 5\n") == 1);
  CHECK(error_line("[sheet S1]\nA1 = 5\nA1 = 6\n") == 3);
  CHECK(error_line("[sheet S1]\n\nB2 = =1+\n") == 3);
  CHECK(error_line("[sheet S1]\nB2 = abc\n") == 2);
  CHECK(error_line("[sheet S1]\nB2\n") == 2);
  CHECK(error_line("[sheet S1]\n[sheet s1]\n") == 2);
  CHECK(error_line("[sheet S1]\n[name X = Missing!A1]\n") == 2);
  CHECK(error_line("[sheet S1]\n[name 1X = S1!A1]\n") == 2);
  CHECK(error_line("[sheet S1]\n[bogus]\n") == 2);
  CHECK(error_line("[sheet S1]\nZZZZ1 = 1\n") == 2);
  CHECK(error_line("[sheet S1]\nA1 = \"open\n") == 2);
}

TEST_CASE("CRLF is accepted and canonicalized") {
  Workbook lf = parse_workbook("[sheet S1]\nA1 = 5\nB1 = =A1*2\n");
  Workbook crlf = parse_workbook("[sheet S1]\r\nA1 = 5\r\nB1 = =A1*2\r\n");
  CHECK(lf == crlf);
  CHECK(to_text(crlf) == to_text(lf));
  CHECK(to_text(crlf).find('\r') == std::string::npos);
}

TEST_CASE("canonical samples are byte-stable") {
  for (const char* name : {"cashflow.wb", "cashflow_v2.wb"}) {
    CAPTURE(name);
    const std::string bytes = read_file(fixtures::sample(name));
    const Workbook wb = parse_workbook(bytes, name);
    CHECK(to_text(wb) == bytes);
    CHECK(to_text(parse_workbook(to_text(wb))) == to_text(wb));

    fixtures::TempDir dir("textio");
    save_workbook(wb, dir / "copy.wb");
    CHECK(read_file(dir / "copy.wb") == bytes);
    const LoadedWorkbook loaded = load_workbook(dir / "copy.wb");
    CHECK(loaded.workbook == wb);
    CHECK(loaded.fingerprint == sha256_hex(bytes));
  }
}

TEST_CASE("serialization round trip over random workbooks") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    randwb::Instance inst = randwb::generate(rng, 10, 20);
    Workbook wb = inst.workbook;
    for (int k = 1; k <= 10; ++k) {
      double x;
      do {
        const std::uint64_t bits = rng();
        std::memcpy(&x, &bits, sizeof x);
      } while (!std::isfinite(x));
      wb.set_value(CellAddress{"Data", 20 + k, 2, false, false}, Value::number(x));
    }
    const std::string text = to_text(wb);
    const Workbook back = parse_workbook(text);
    REQUIRE(to_text(back) == text);
    // Formula sources are rewritten canonically; the trees and literal
    // bits must survive unchanged.
    for (const Sheet& sheet : wb.sheets()) {
      const Sheet* other = back.find_sheet(sheet.name());
      REQUIRE(other != nullptr);
      REQUIRE(other->cells().size() == sheet.cells().size());
      for (const auto& [rc, c] : sheet.cells()) {
        const Cell* d = other->find(rc.first, rc.second);
        REQUIRE(d != nullptr);
        REQUIRE(d->is_formula() == c.is_formula());
        if (c.is_formula()) {
          REQUIRE(*d->as_formula().ast == *c.as_formula().ast);
        } else {
          REQUIRE(bit_equal(d->as_literal(), c.as_literal()));
        }
      }
    }
  }
}

TEST_CASE("sha256 and fingerprints") {
  CHECK(sha256_hex("") == "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Workbook a = fixtures::load_sample("cashflow.wb");
  Workbook b = fixtures::load_sample("cashflow_v2.wb");
  CHECK(fingerprint(a) != fingerprint(b));
  CHECK(fingerprint(a) == sha256_hex(to_text(a)));
}

TEST_CASE("missing files raise") {
  CHECK_THROWS(read_file("/nonexistent/dir/file.wb"));
  CHECK_THROWS(load_workbook("/nonexistent/dir/file.wb"));
}
