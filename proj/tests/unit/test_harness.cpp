#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "usol/harness.hpp"

using namespace usol;
using namespace usol::harness;

TEST_CASE("config text and validation") {
  ExperimentConfig c;
  apply_config_text(c, "# comment\ndim = 4\nsignature-k = 2  # trailing\ngrid=32\nbox = 8\npair = 3/4, 1/4\n"
                       "lambda-seq = 0.125:0.0078125:5\nz-sweep = line:-2:2:1:5\ntol.slope = 0.2\n");
  CHECK(c.d == 4);
  CHECK(c.k == 2);
  CHECK(c.n == 32);
  CHECK(c.L == 8.0);
  CHECK(*c.pair == vertex(4, 'F'));
  REQUIRE(c.lambdas.size() == 5);
  CHECK(c.lambdas[2] == doctest::Approx(1.0 / 32));
  CHECK(c.tol("slope", 1.0) == 0.2);
  CHECK(c.tol("other", 1.0) == 1.0);
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "grid", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "z-sweep", "spiral:3"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "no equals sign"), ConfigError);
  ExperimentConfig bad;
  bad.n = 48;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad.n = 64;
  bad.k = 3;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad.k = 1;
  bad.lambdas = {0.5, 1.5};
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("z sweeps") {
  auto c = parse_z_sweep("circle:8");
  CHECK(c.size() == 8);
  auto l = parse_z_sweep("line:-1:1:0.5:3");
  REQUIRE(l.size() == 3);
  CHECK(l[1].a == doctest::Approx(0.0));
  CHECK(l[2].b == 0.5);
}

namespace {
ExperimentReport toy() {
  ExperimentReport r;
  r.name = "toy";
  r.criterion = 99;
  r.table.columns = {"series", "x", "y", "note"};
  for (double x : {1.0, 2.0, 4.0, 8.0}) {
    r.table.add_row({"a", fmt(x), fmt(3.0 * x * x), "plain"});
    r.table.add_row({"b", fmt(x), fmt(1.0 / x), "has, comma \"quoted\""});
  }
  Check s;
  s.label = "slope_a";
  s.kind = "slope";
  s.column = "y";
  s.x_column = "x";
  s.filter_column = "series";
  s.filter_value = "a";
  s.lo = 1.9;
  s.hi = 2.1;
  s.anchor = "y = 3 x^2";
  r.checks.push_back(s);
  Check m = s;
  m.label = "ratio_b";
  m.kind = "ratio";
  m.filter_value = "b";
  m.lo = 0;
  m.hi = 7;
  r.checks.push_back(m);
  Check n = m;
  n.label = "count";
  n.kind = "count";
  n.filter_column.clear();
  n.lo = n.hi = 8;
  r.checks.push_back(n);
  evaluate_all(r);
  return r;
}
}  // namespace

TEST_CASE("check evaluation") {
  ExperimentReport r = toy();
  CHECK(r.checks[0].value == doctest::Approx(2.0));
  CHECK(r.checks[0].pass);
  CHECK(r.checks[1].value == doctest::Approx(8.0));
  CHECK_FALSE(r.checks[1].pass);
  CHECK(r.checks[2].pass);
  CHECK_FALSE(r.pass());
}

TEST_CASE("CSV round trip and recheck") {
  ExperimentReport r = toy();
  std::string csv = to_csv(r, "2000-01-01T00:00:00Z");
  CHECK(csv.rfind("# usol toy generated 2000-01-01T00:00:00Z", 0) == 0);
  ExperimentReport back = recheck_csv_text(csv);
  REQUIRE(back.table.rows.size() == r.table.rows.size());
  CHECK(back.table.rows[1][3] == "has, comma \"quoted\"");
  REQUIRE(back.checks.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.checks[i].pass == r.checks[i].pass);
    CHECK(back.checks[i].value == r.checks[i].value);
  }
  // Tampering with a row flips the recomputed verdict and leaves a note.
  std::string tampered = csv;
  auto pos = tampered.find("a,8,192");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 7, "a,8,900");
  ExperimentReport t = recheck_csv_text(tampered);
  CHECK_FALSE(t.checks[0].pass);
  bool noted = false;
  for (const auto& n : t.notes) noted = noted || n.rfind("recheck:", 0) == 0;
  CHECK(noted);
}

TEST_CASE("fmt round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(fmt(v)) == v);
  CHECK(fmt(INFINITY) == "inf");
}

TEST_CASE("region experiment and CLI exit codes") {
  ExperimentConfig c;
  ExperimentReport r = run_experiment("region", c);
  CHECK(r.table.rows.size() == 12);
  CHECK(r.pass());
  auto dir = std::filesystem::temp_directory_path() / "usol_cli_test";
  std::string out = dir.string();
  {
    const char* argv[] = {"usol", "region", "--dim", "3", "--out", out.c_str()};
    CHECK(cli_main(6, const_cast<char**>(argv)) == 0);
    CHECK(std::filesystem::exists(dir / "region.csv"));
  }
  {
    const char* argv[] = {"usol", "region", "--dim", "2", "--out", out.c_str()};
    CHECK(cli_main(6, const_cast<char**>(argv)) == 2);
  }
  {
    const char* argv[] = {"usol", "region", "--grid", "48"};
    CHECK(cli_main(4, const_cast<char**>(argv)) == 2);
  }
  {
    std::string p = (dir / "region.csv").string();
    const char* argv[] = {"usol", "recheck", p.c_str()};
    CHECK(cli_main(3, const_cast<char**>(argv)) == 0);
  }
  CHECK(subcommand_experiments("pv-check").size() == 2);
  CHECK(subcommand_experiments("all").size() == experiment_names().size());
  CHECK_THROWS_AS(subcommand_experiments("nope"), ConfigError);
}

TEST_CASE("experiments are deterministic for a fixed seed") {
  ExperimentConfig c;
  ExperimentReport a = run_experiment("abc-completeness", c), b = run_experiment("abc-completeness", c);
  CHECK(a.table.rows == b.table.rows);
  c.seed = 2;
  ExperimentReport d = run_experiment("abc-completeness", c);
  CHECK(d.table.rows != a.table.rows);
}
