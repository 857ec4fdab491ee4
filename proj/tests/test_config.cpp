#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "oracles.hpp"
#include "psifrac/config.hpp"
#include "psifrac/errors.hpp"
#include "psifrac/io.hpp"

using namespace psifrac;

TEST_CASE("parses sections, comments, and loose whitespace") {
  const Config cfg = Config::parse_string(
      "# leading comment\n"
      "grid.T = 3.5\n"
      "\n"
      "grid.n=129   # trailing comment\n"
      "  psi.kind =  power  \n"
      "solver.quiet = true\n"
      "run.seed = 12345678901234\n");
  CHECK(cfg.has("grid.T"));
  CHECK(cfg.get_real("grid.T", 0.0) == 3.5);
  CHECK(cfg.get_int("grid.n", 0) == 129);
  CHECK(cfg.get_string("psi.kind", "") == "power");
  CHECK(cfg.get_bool("solver.quiet", false));
  CHECK(cfg.get_u64("run.seed", 0) == 12345678901234ull);
  CHECK_FALSE(cfg.has("grid.rule"));
  CHECK(cfg.get_string("grid.rule", "psi") == "psi");
  CHECK_NOTHROW(cfg.finish());
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS((void)Config::parse_string("grid.T 3.5\n"), ConfigError);
  CHECK_THROWS_AS((void)Config::parse_string("= 3\n"), ConfigError);
  CHECK_THROWS_AS((void)Config::parse_string("a.b = 1\na.b = 2\n"), ConfigError);
}

TEST_CASE("typed getters validate the stored text") {
  const Config cfg = Config::parse_string(
      "x.real = nope\nx.int = 2.5\nx.bool = maybe\n");
  CHECK_THROWS_AS((void)cfg.get_real("x.real", 1.0), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_int("x.int", 1), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_bool("x.bool", true), ConfigError);
}

TEST_CASE("required keys throw when missing") {
  const Config cfg = Config::parse_string("a.x = 1\n");
  CHECK(cfg.require_real("a.x") == 1.0);
  CHECK_THROWS_AS((void)cfg.require_real("a.y"), ConfigError);
  CHECK_THROWS_AS((void)cfg.require_string("a.z"), ConfigError);
}

TEST_CASE("finish rejects keys no getter ever consulted") {
  const Config cfg = Config::parse_string("a.x = 1\nb.typo = 2\n");
  (void)cfg.get_real("a.x", 0.0);
  CHECK_THROWS_AS(cfg.finish(), ConfigError);
  try {
    cfg.finish();
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("b.typo") != std::string::npos);
  }
}

TEST_CASE("set() overrides parsed values and counts as present") {
  Config cfg = Config::parse_string("a.x = 1\n");
  cfg.set("a.x", "7");
  cfg.set("a.new", "hello");
  CHECK(cfg.get_real("a.x", 0.0) == 7.0);
  CHECK(cfg.get_string("a.new", "") == "hello");
  CHECK_NOTHROW(cfg.finish());
}

TEST_CASE("parse_file round-trips through the filesystem") {
  const std::string path = "/tmp/psifrac_cfg_test.cfg";
  oracle::write_file(path, "grid.T = 2\npsi.rho = 1.5\n");
  const Config cfg = Config::parse_file(path);
  CHECK(cfg.get_real("grid.T", 0.0) == 2.0);
  CHECK(cfg.get_real("psi.rho", 0.0) == 1.5);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)Config::parse_file("/tmp/does_not_exist_psifrac.cfg"),
                  ConfigError);
}

TEST_CASE("numeric text is full precision and locale independent") {
  CHECK(fmt_real(0.1) == "0.10000000000000001");
  CHECK(fmt_real(1.0) == "1");
  CHECK(fmt_real(-2.5e-300).find('.') != std::string::npos);
  CHECK(fmt_int(-42) == "-42");
  // round trip: text back to double is bit-identical
  for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e-17, 3.14159}) {
    CHECK(std::stod(fmt_real(v)) == v);
  }
}

TEST_CASE("report writer emits one key = value line per add") {
  ReportWriter r;
  r.add("alpha", 0.5);
  r.add("n", 129);
  r.add("converged", true);
  r.add("kind", std::string("solve"));
  CHECK(r.text() ==
        "alpha = 0.5\nn = 129\nconverged = true\nkind = solve\n");
}

TEST_CASE("csv writer enforces the column count") {
  CsvWriter w({"xi", "u"});
  w.add_row(std::vector<double>{0.0, 1.0});
  w.add_row({std::string("0.5"), std::string("2")});
  CHECK(w.text() == "xi,u\n0,1\n0.5,2\n");
  CHECK_THROWS_AS(w.add_row(std::vector<double>{1.0}), Error);
}
