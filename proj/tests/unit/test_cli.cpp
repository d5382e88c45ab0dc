#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "fixtures.hpp"
#include "sheetcheck/documents.hpp"
#include "sheetcheck/textio.hpp"

namespace {

struct Run {
  int status = -1;
  std::string output;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Runs the command-line tool with stderr folded into stdout.
Run cli(const std::string& args) {
  const std::string cmd = quote(SHEETCHECK_CLI) + " " + args + " 2>&1";
  Run run;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) run.output.append(buf.data(), n);
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

std::string sample(const char* name) { return quote(fixtures::sample(name).string()); }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("test prints the suite summary and exits 1 on a failure") {
  fixtures::TempDir dir("cli");
  const std::string log = quote((dir / "run.log").string());
  Run r = cli("test " + sample("cashflow.wb") + " --suite " + sample("suite5.json") + " --log " + log);
  CAPTURE(r.output);
  CHECK(r.status == 1);
  CHECK(contains(r.output, "Number of tests run: 5"));
  CHECK(contains(r.output, "Number passed: 4"));
  CHECK(contains(r.output, "Number failed: 1"));
  CHECK(contains(r.output, "Lookups!F3=23: 22 | 23 | FALSE"));
  CHECK(sheetcheck::read_log(dir / "run.log").size() == 5);

  Run dt = cli("test " + sample("cashflow.wb") + " --suite " + sample("datatable.json"));
  CAPTURE(dt.output);
  CHECK(dt.status == 0);
}

TEST_CASE("check runs invariants") {
  Run r = cli("check " + sample("cashflow.wb"));
  CAPTURE(r.output);
  CHECK(r.status == 0);
  CHECK(contains(r.output, "Checks!X66"));

  fixtures::TempDir dir("check");
  sheetcheck::Workbook wb = fixtures::load_sample("cashflow.wb");
  wb.set_value(sheetcheck::parse_address("'Project Cashflows'!G31", ""), sheetcheck::Value::number(5));
  sheetcheck::save_workbook(wb, dir / "broken.wb");
  r = cli("check " + quote((dir / "broken.wb").string()));
  CAPTURE(r.output);
  CHECK(r.status == 1);
}

TEST_CASE("regress and baseline") {
  Run self = cli("regress " + sample("cashflow.wb") + " " + sample("cashflow.wb") + " --scenarios " +
                 sample("scenarios.json"));
  CAPTURE(self.output);
  CHECK(self.status == 0);
  CHECK(contains(self.output, "matches reference"));

  Run diff = cli("regress " + sample("cashflow.wb") + " " + sample("cashflow_v2.wb") + " --scenarios " +
                 sample("scenarios.json"));
  CHECK(diff.status == 1);
  CHECK(contains(diff.output, "differs from reference"));
  CHECK(contains(diff.output, "Checks!X68"));

  Run wide = cli("regress " + sample("cashflow.wb") + " " + sample("cashflow_v2.wb") + " --scenarios " +
                 sample("scenarios.json") + " --tol 0.02,0");
  CHECK(wide.status == 0);

  fixtures::TempDir dir("baseline");
  const std::string out = quote((dir / "base.json").string());
  Run rec = cli("baseline " + sample("cashflow.wb") + " --scenarios " + sample("scenarios.json") + " --out " + out);
  CAPTURE(rec.output);
  REQUIRE(rec.status == 0);
  Run vs = cli("regress --baseline " + out + " " + sample("cashflow.wb") + " --scenarios " + sample("scenarios.json") +
               " --tol 0,0");
  CAPTURE(vs.output);
  CHECK(vs.status == 0);
  Run vs2 = cli("regress --baseline " + out + " " + sample("cashflow_v2.wb") + " --scenarios " +
                sample("scenarios.json") + " --json");
  CHECK(vs2.status == 1);
  CHECK(contains(vs2.output, "\"status\""));
}

TEST_CASE("summary shows the latest status per id") {
  fixtures::TempDir dir("summary");
  const std::string log = quote((dir / "run.log").string());
  cli("test " + sample("cashflow.wb") + " --suite " + sample("suite5.json") + " --log " + log);
  cli("test " + sample("cashflow.wb") + " --suite " + sample("suite5.json") + " --log " + log);
  CHECK(sheetcheck::read_log(dir / "run.log").size() == 10);
  Run r = cli("summary --log " + log);
  CAPTURE(r.output);
  CHECK(r.status == 1);
  CHECK(contains(r.output, "Number of tests run: 5"));
  CHECK(contains(r.output, "Number passed: 4"));

  Run stale = cli("summary --log " + log + " --workbook " + sample("cashflow_v2.wb"));
  CAPTURE(stale.output);
  CHECK(contains(stale.output, "stale"));
  Run fresh = cli("summary --log " + log + " --workbook " + sample("cashflow.wb"));
  CHECK_FALSE(contains(fresh.output, "stale"));
}

TEST_CASE("probe and branches") {
  Run s = cli("probe sentinels 2x3 --at Lookups!B3");
  CAPTURE(s.output);
  CHECK(s.status == 0);
  CHECK(contains(s.output, "[sheet Lookups]"));
  CHECK(contains(s.output, "D4 = 23"));

  Run h = cli("probe onehot 3 2");
  CHECK(h.status == 0);
  CHECK(contains(h.output, "A2 = 1"));

  Run b = cli("probe boundaries rate");
  CHECK(b.status == 0);
  CHECK(contains(b.output, "A2 = 1e-04"));

  Run br = cli("branches " + sample("cashflow.wb"));
  CHECK(br.status == 0);
  CHECK(contains(br.output, "Checks!X66"));
}

TEST_CASE("calc and format") {
  Run c = cli("calc " + sample("cashflow.wb") + " Checks!X64 ConstructionTotal");
  CAPTURE(c.output);
  CHECK(c.status == 0);
  CHECK(contains(c.output, "3970"));
  CHECK(contains(c.output, "-360"));

  Run f = cli("format " + sample("cashflow.wb"));
  CHECK(f.status == 0);
  CHECK(f.output == sheetcheck::read_file(fixtures::sample("cashflow.wb")));
}

TEST_CASE("exit codes for usage and file errors") {
  CHECK(cli("").status == 2);
  CHECK(cli("frobnicate").status == 2);
  CHECK(cli("test " + sample("cashflow.wb")).status == 2);
  CHECK(cli("regress " + sample("cashflow.wb") + " --scenarios " + sample("scenarios.json")).status == 2);
  CHECK(cli("regress a b --scenarios s --tol nope").status == 2);
  CHECK(cli("probe sentinels 10x1").status == 2);

  CHECK(cli("test /nonexistent.wb --suite " + sample("suite5.json")).status == 3);
  CHECK(cli("test " + sample("cashflow.wb") + " --suite " + sample("cashflow.wb")).status == 3);
  fixtures::TempDir dir("bad");
  sheetcheck::write_file(dir / "bad.wb", "[sheet S1]\nA1 = =1+\n");
  Run bad = cli("check " + quote((dir / "bad.wb").string()));
  CHECK(bad.status == 3);
  CHECK(contains(bad.output, "bad.wb:2"));
}
