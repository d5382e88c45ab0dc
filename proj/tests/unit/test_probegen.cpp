#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "fixtures.hpp"
#include "random_workbook.hpp"
#include "sheetcheck/engine.hpp"
#include "sheetcheck/probegen.hpp"
#include "sheetcheck/textio.hpp"

using namespace sheetcheck;

TEST_CASE("lookup_sentinels") {
  SentinelGrid one = lookup_sentinels(1, 1);
  CHECK(one.values == std::vector<double>{11});
  CHECK(lookup_sentinels(2, 3).at(2, 3) == 23);
  SentinelGrid three = lookup_sentinels(3, 3);
  CHECK(three.values == std::vector<double>{11, 12, 13, 21, 22, 23, 31, 32, 33});

  CHECK_THROWS_AS(lookup_sentinels(0, 1), std::out_of_range);
  CHECK_THROWS_AS(lookup_sentinels(10, 1), std::out_of_range);
  CHECK_THROWS_AS(lookup_sentinels(1, 10), std::out_of_range);
  CHECK(lookup_sentinels(12, 40, true).at(12, 40) == 1240);
  CHECK_THROWS_AS(lookup_sentinels(100, 1, true), std::out_of_range);
}

TEST_CASE("sentinels are distinct and decode to their position") {
  for (bool extended : {false, true}) {
    const std::int32_t limit = extended ? 25 : 9;
    for (std::int32_t rows = 1; rows <= limit; ++rows) {
      for (std::int32_t cols = 1; cols <= limit; ++cols) {
        const SentinelGrid g = lookup_sentinels(rows, cols, extended);
        std::set<double> seen(g.values.begin(), g.values.end());
        REQUIRE(seen.size() == g.values.size());
        for (std::int32_t r = 1; r <= rows; ++r)
          for (std::int32_t c = 1; c <= cols; ++c) REQUIRE(g.decode(g.at(r, c)) == std::make_pair(r, c));
      }
    }
  }
}

TEST_CASE("one_hot") {
  CHECK(one_hot(3, 2) == std::vector<double>{0, 1, 0});
  CHECK(one_hot(1, 1) == std::vector<double>{1});
  CHECK(one_hot(4, 4, 5, -1) == std::vector<double>{-1, -1, -1, 5});
  CHECK_THROWS_AS(one_hot(3, 0), std::out_of_range);
  CHECK_THROWS_AS(one_hot(3, 4), std::out_of_range);
  CHECK_THROWS_AS(one_hot(0, 1), std::out_of_range);

  for (std::int32_t n = 1; n <= 20; ++n) {
    for (std::int32_t k = 1; k <= n; ++k) {
      const std::vector<double> v = one_hot(n, k, 3.5, 0.25);
      CHECK(std::accumulate(v.begin(), v.end(), 0.0) == 3.5 + (n - 1) * 0.25);
    }
  }
}

TEST_CASE("one-hot vectors pick aligned SUMPRODUCT weights") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> weight(-1e6, 1e6);
  for (std::int32_t n = 1; n <= 20; ++n) {
    Workbook wb;
    wb.add_sheet("S1");
    for (std::int32_t i = 1; i <= n; ++i) wb.set_value(CellAddress{"S1", i, 2, false, false}, Value::number(weight(rng)));
    const std::string col = std::to_string(n);
    wb.set_formula(CellAddress{"S1", 1, 3, false, false}, "=SUMPRODUCT(A1:A" + col + ",B1:B" + col + ")");
    for (std::int32_t k = 1; k <= n; ++k) {
      const std::vector<double> hot = one_hot(n, k);
      for (std::int32_t i = 1; i <= n; ++i) wb.set_value(CellAddress{"S1", i, 1, false, false}, Value::number(hot[i - 1]));
      const ValueMap v = recalculate(wb);
      REQUIRE(bit_equal(v.at(CellAddress{"S1", 1, 3, false, false}), v.at(CellAddress{"S1", k, 2, false, false})));
    }
  }
}

TEST_CASE("boundary_values") {
  const std::vector<double> rate = boundary_values(BoundaryKind::Rate);
  CHECK(std::find(rate.begin(), rate.end(), 0.0) != rate.end());
  CHECK(rate == std::vector<double>{0, 0.0001, -0.0001, 1});
  CHECK(boundary_values("count") == std::vector<double>{0, 1});
  const std::vector<double> amount = boundary_values("Amount");
  CHECK(std::find(amount.begin(), amount.end(), -1.0) != amount.end());
  CHECK(std::find(amount.begin(), amount.end(), 1.0) != amount.end());
  CHECK_THROWS_AS(boundary_values("price"), std::invalid_argument);
  CHECK_FALSE(parse_boundary_kind("").has_value());
}

TEST_CASE("list_branch_points examples") {
  Workbook wb = fixtures::workbook("[sheet S1]\nA1 = 3\nC1 = =IF(A1>0,1,2)\n");
  std::vector<BranchPoint> points = list_branch_points(wb);
  REQUIRE(points.size() == 1);
  CHECK(points[0].kind == BranchKind::If);
  CHECK(points[0].argument_count == 3);
  CHECK(format_address(points[0].address) == "S1!C1");

  wb = fixtures::workbook("[sheet S1]\nA1 = =MAX(MIN(A2,B1),0)\n");
  points = list_branch_points(wb);
  REQUIRE(points.size() == 2);
  CHECK(points[0].kind == BranchKind::Max);
  CHECK(points[1].kind == BranchKind::Min);

  Workbook fixture = fixtures::workbook("[sheet S1]\nX64 = 1\nX65 = 1\nX66 = =IF(X65=X64,\"Pass\",\"Fail\")\n");
  points = list_branch_points(fixture);
  REQUIRE(points.size() == 1);
  CHECK(format_address(points[0].address) == "S1!X66");
  CHECK(branch_kind_name(BranchKind::If) == "IF");
}

TEST_CASE("list_branch_points matches a brute-force walk") {
  auto brute = [](const Workbook& wb) {
    std::multiset<std::tuple<std::string, std::int32_t, std::int32_t, std::string, std::size_t>> out;
    for (const Sheet& s : wb.sheets()) {
      for (const auto& [rc, cell] : s.cells()) {
        if (!cell.is_formula()) continue;
        // Reparse the stored source rather than reuse the stored tree.
        AstPtr tree = parse_formula(cell.as_formula().source, s.name());
        visit(*tree, [&](const Ast& n) {
          if (const auto* call = std::get_if<CallNode>(&n.node)) {
            if (call->function == "IF" || call->function == "MIN" || call->function == "MAX")
              out.emplace(s.name(), rc.first, rc.second, call->function, call->args.size());
          }
        });
      }
    }
    return out;
  };
  auto listed = [](const Workbook& wb) {
    std::multiset<std::tuple<std::string, std::int32_t, std::int32_t, std::string, std::size_t>> out;
    for (const BranchPoint& p : list_branch_points(wb)) {
      const Cell* cell = wb.cell(p.address);
      REQUIRE(cell != nullptr);
      REQUIRE(cell->is_formula());
      out.emplace(p.address.sheet, p.address.row, p.address.col, std::string(branch_kind_name(p.kind)),
                  p.argument_count);
    }
    return out;
  };

  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    randwb::Instance inst = randwb::generate(rng, 6, 25);
    CHECK(listed(inst.workbook) == brute(inst.workbook));
  }
  Workbook cash = fixtures::load_sample("cashflow.wb");
  CHECK(listed(cash) == brute(cash));

  // Ordering: sheet order, then row, then column.
  const std::vector<BranchPoint> points = list_branch_points(cash);
  CHECK(points.size() > 2000);
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto& a = points[k - 1].address;
    const auto& b = points[k].address;
    if (a.sheet == b.sheet) CHECK(std::make_pair(a.row, a.col) <= std::make_pair(b.row, b.col));
  }
}

TEST_CASE("fragments load as workbook text") {
  const std::string grid = sentinel_fragment(lookup_sentinels(2, 2), parse_address("Lookups!B3", ""));
  CHECK(grid == "B3 = 11\nC3 = 12\nB4 = 21\nC4 = 22\n");
  Workbook wb = parse_workbook("[sheet Lookups]\n" + grid);
  CHECK(wb.cell(parse_address("Lookups!C4", ""))->as_literal() == Value::number(22));

  CHECK(column_fragment(one_hot(3, 2), parse_address("S!B10", "")) == "B10 = 0\nB11 = 1\nB12 = 0\n");
  CHECK(column_fragment(boundary_values(BoundaryKind::Rate), parse_address("S!A1", "")) ==
        "A1 = 0\nA2 = 1e-04\nA3 = -1e-04\nA4 = 1\n");
}
