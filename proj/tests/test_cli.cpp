#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "oracles.hpp"

// End-to-end runs of the shipped binary (path injected by the build).
// Exit codes: 0 = success / audit passed, 1 = honest negative result,
// 2 = configuration or usage error.

namespace {

const std::string kSolveCfg =
    "grid.T = 1\n"
    "grid.n = 129\n"
    "problem.alpha = 1\n"
    "problem.beta = 1\n"
    "problem.p = 2\n"
    "nonlinearity.id = affine\n"
    "nonlinearity.c = 1\n"
    "solver.init_amplitude = 0.1\n";

std::string cfg_path(const std::string& dir, const std::string& name,
                     const std::string& text) {
  const std::string p = dir + "/" + name;
  oracle::write_file(p, text);
  return p;
}

}  // namespace

TEST_CASE("usage and configuration errors exit with code 2") {
  const std::string dir = oracle::make_temp_dir("err");
  CHECK(oracle::run_cli("") == 2);
  CHECK(oracle::run_cli("solve") == 2);
  CHECK(oracle::run_cli("solve --config /nonexistent.cfg") == 2);
  const std::string bad = cfg_path(dir, "bad.cfg", "no.such.key = 1\n");
  CHECK(oracle::run_cli("solve --config " + bad + " --out " + dir + "/x") == 2);
  const std::string cust = cfg_path(dir, "cust.cfg", "nonlinearity.id = custom\n");
  CHECK(oracle::run_cli("solve --config " + cust + " --out " + dir + "/x") == 2);
  const std::string ok = cfg_path(dir, "ok.cfg", "grid.n = 65\n");
  CHECK(oracle::run_cli("eigen --config " + ok + " --level 3 --out " + dir + "/x") == 2);
  CHECK(oracle::run_cli("eigen --config " + ok + " --sweep alpha=0.9:0.5:0.1 --out " +
                        dir + "/x") == 2);
  const std::string dup = cfg_path(dir, "dup.cfg", "grid.n = 65\ngrid.n = 129\n");
  CHECK(oracle::run_cli("solve --config " + dup + " --out " + dir + "/x") == 2);
}

TEST_CASE("solve writes the solution, trace, and report artifacts") {
  const std::string dir = oracle::make_temp_dir("solve");
  const std::string cfg = cfg_path(dir, "run.cfg", kSolveCfg);
  REQUIRE(oracle::run_cli("solve --config " + cfg + " --out " + dir + "/s") == 0);
  REQUIRE(oracle::file_exists(dir + "/s.csv"));
  REQUIRE(oracle::file_exists(dir + "/s.trace.csv"));
  REQUIRE(oracle::file_exists(dir + "/s.report"));
  const std::string rep = oracle::read_file(dir + "/s.report");
  // contract: these four keys name the solve outcome
  CHECK(rep.find("converged = true") != std::string::npos);
  CHECK(rep.find("iterations = ") != std::string::npos);
  CHECK(rep.find("critical_level_c = ") != std::string::npos);
  CHECK(rep.find("final_grad_norm = ") != std::string::npos);
  const std::string csv = oracle::read_file(dir + "/s.csv");
  CHECK(csv.rfind("xi,", 0) == 0);  // header row first
}

TEST_CASE("an exhausted iteration budget is an honest failure, exit 1") {
  const std::string dir = oracle::make_temp_dir("budget");
  const std::string cfg =
      cfg_path(dir, "run.cfg", kSolveCfg + "solver.max_iter = 5\n");
  CHECK(oracle::run_cli("solve --config " + cfg + " --out " + dir + "/s") == 1);
  CHECK(oracle::read_file(dir + "/s.report").find("converged = false") !=
        std::string::npos);
}

TEST_CASE("eigen reports the classical ground state") {
  const std::string dir = oracle::make_temp_dir("eigen");
  const std::string cfg = cfg_path(
      dir, "run.cfg",
      "grid.T = 3.14159265358979324\ngrid.n = 129\nproblem.alpha = 1\n"
      "problem.beta = 1\nproblem.p = 2\n");
  REQUIRE(oracle::run_cli("eigen --config " + cfg + " --out " + dir + "/e") == 0);
  const std::string rep = oracle::read_file(dir + "/e.report");
  CHECK(rep.find("lambda = 0.9999") != std::string::npos);
  CHECK(rep.find("converged = true") != std::string::npos);
  REQUIRE(oracle::run_cli("eigen --config " + cfg + " --level 2 --out " + dir +
                          "/e2") == 0);
  const std::string rep2 = oracle::read_file(dir + "/e2.report");
  CHECK(rep2.find("level = 2") != std::string::npos);
  CHECK(rep2.find("lambda = 3.999") != std::string::npos);
}

TEST_CASE("audit passes for a mid-bracket power entry and fails for linear") {
  const std::string dir = oracle::make_temp_dir("check");
  // classical (0, pi): lambda_1 = 1, lambda_2 = 4; F = 3 t^2 sits mid-bracket
  const std::string pass_cfg = cfg_path(
      dir, "pass.cfg",
      "grid.T = 3.14159265358979324\ngrid.n = 129\nproblem.alpha = 1\n"
      "problem.beta = 1\nproblem.p = 2\nnonlinearity.id = power\n"
      "nonlinearity.lambda = 6\nhypothesis.epsilon = 1\n");
  CHECK(oracle::run_cli("check --config " + pass_cfg + " --out " + dir + "/ok") == 0);
  const std::string rep = oracle::read_file(dir + "/ok.report");
  CHECK(rep.find("hypotheses_pass = true") != std::string::npos);
  CHECK(oracle::file_exists(dir + "/ok.csv"));  // per-node theta estimates

  const std::string fail_cfg = cfg_path(
      dir, "fail.cfg",
      "grid.T = 3.14159265358979324\ngrid.n = 129\nproblem.alpha = 1\n"
      "problem.beta = 1\nproblem.p = 2\nnonlinearity.id = linear\n"
      "nonlinearity.lambda = 1\nhypothesis.epsilon = 0.5\n"
      "hypothesis.audit = positive-theta\n");
  CHECK(oracle::run_cli("check --config " + fail_cfg + " --out " + dir + "/no") == 1);
  const std::string rep2 = oracle::read_file(dir + "/no.report");
  CHECK(rep2.find("hypotheses_pass = false") != std::string::npos);
  CHECK(rep2.find("witness_t = ") != std::string::npos);
}

TEST_CASE("convergence study passes its target and fails an impossible one") {
  const std::string dir = oracle::make_temp_dir("conv");
  const std::string good = cfg_path(
      dir, "good.cfg",
      "grid.T = 1\nproblem.alpha = 0.5\nconverge.case = power_rule\n"
      "converge.delta = 2.5\nconverge.target_order = 1.2\n");
  CHECK(oracle::run_cli("converge --config " + good + " --out " + dir + "/g") == 0);
  const std::string hard = cfg_path(
      dir, "hard.cfg",
      "grid.T = 1\nproblem.alpha = 0.5\nconverge.case = power_rule\n"
      "converge.delta = 2.5\nconverge.target_order = 4\n");
  CHECK(oracle::run_cli("converge --config " + hard + " --out " + dir + "/h") == 1);
}

TEST_CASE("transposition study needs at least two sizes to check decrease") {
  const std::string dir = oracle::make_temp_dir("ibp");
  const std::string one = cfg_path(dir, "one.cfg",
                                   "grid.T = 1\nibp.levels = 64\n");
  CHECK(oracle::run_cli("ibp-test --config " + one + " --out " + dir + "/x") == 1);
  CHECK(oracle::read_file(dir + "/x.report").find("insufficient refinement") !=
        std::string::npos);
  const std::string two = cfg_path(dir, "two.cfg",
                                   "grid.T = 1\nibp.levels = 64,128,256\n");
  CHECK(oracle::run_cli("ibp-test --config " + two + " --out " + dir + "/y") == 0);
  CHECK(oracle::file_exists(dir + "/y.csv"));
  CHECK(oracle::file_exists(dir + "/y.report"));
}

TEST_CASE("weight dump writes one CSV row per node and exits clean") {
  const std::string dir = oracle::make_temp_dir("wdump");
  const std::string cfg = cfg_path(
      dir, "w.cfg", "grid.T = 1\ngrid.n = 17\nproblem.alpha = 0.5\n");
  REQUIRE(oracle::run_cli("solve --config " + cfg + " --dump-weights " + dir +
                          "/w.csv") == 0);
  const std::string csv = oracle::read_file(dir + "/w.csv");
  CHECK(csv.rfind("k0,", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 18);  // header + one row per node
}

TEST_CASE("identical runs produce byte-identical artifacts") {
  const std::string a = oracle::make_temp_dir("det_a");
  const std::string b = oracle::make_temp_dir("det_b");
  const std::string cfg_a = cfg_path(a, "run.cfg", kSolveCfg);
  const std::string cfg_b = cfg_path(b, "run.cfg", kSolveCfg);
  REQUIRE(oracle::run_cli("solve --config " + cfg_a + " --seed 42 --out " + a + "/r") == 0);
  REQUIRE(oracle::run_cli("solve --config " + cfg_b + " --seed 42 --out " + b + "/r") == 0);
  CHECK(oracle::read_file(a + "/r.csv") == oracle::read_file(b + "/r.csv"));
  CHECK(oracle::read_file(a + "/r.trace.csv") == oracle::read_file(b + "/r.trace.csv"));
  CHECK(oracle::read_file(a + "/r.report") == oracle::read_file(b + "/r.report"));
}
