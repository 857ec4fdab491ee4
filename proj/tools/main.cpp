#include <clocale>
#include <cstdio>

#include "CLI11.hpp"
#include "psifrac/commands.hpp"
#include "psifrac/errors.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");  // reports and CSVs always use `.` decimals

  CLI::App app{"weighted fractional-derivative energies: solve, eigenvalues, audits"};
  app.require_subcommand(1);

  psifrac::CliOptions cli;
  auto add_common = [&cli](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "flat `section.key = value` config file")
        ->required();
    sub->add_option("--out", cli.out_path, "output base path (artifact suffixes are appended)");
    sub->add_option("--seed", cli.seed, "override the run seed");
    sub->add_flag("--verbose", cli.verbose, "print a one-line summary to stdout");
    sub->add_option("--dump-weights", cli.dump_weights,
                    "write the integral quadrature weight matrix to this CSV and exit");
  };

  CLI::App* solve = app.add_subcommand("solve", "minimize the energy functional");
  add_common(solve);
  solve->add_option("--multistart", cli.multistart, "number of independent starting points");

  CLI::App* eigen = app.add_subcommand("eigen", "estimate a variational eigenvalue");
  add_common(eigen);
  eigen->add_option("--level", cli.level, "eigenvalue index (1 or 2)");
  eigen->add_option("--sweep", cli.sweep, "parameter sweep, e.g. alpha=0.6:0.95:0.05");

  CLI::App* check = app.add_subcommand("check", "audit resonance hypotheses of a nonlinearity");
  add_common(check);
  check->add_option("--audit", cli.audit, "negative-theta or positive-theta");

  CLI::App* converge = app.add_subcommand("converge", "grid-refinement study");
  add_common(converge);

  CLI::App* ibp = app.add_subcommand("ibp-test", "integration-by-parts defect study");
  add_common(ibp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (CLI::App* sub : {solve, eigen, check, converge, ibp})
    if (sub->parsed() && sub->count("--seed") > 0) cli.has_seed = true;

  try {
    if (!cli.dump_weights.empty()) return psifrac::run_dump_weights(cli);
    if (solve->parsed()) return psifrac::run_solve(cli);
    if (eigen->parsed()) return psifrac::run_eigen(cli);
    if (check->parsed()) return psifrac::run_check(cli);
    if (converge->parsed()) return psifrac::run_converge(cli);
    if (ibp->parsed()) return psifrac::run_ibp_test(cli);
  } catch (const psifrac::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const psifrac::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
