#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qnash/report.hpp"

int main(int argc, char** argv) {
  qnash::RunConfig config;
  std::string format = "json";

  CLI::App app{"qnash: quantum game pricing, equilibrium and securities toolkit"};
  app.set_version_flag("--version", std::string(QNASH_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "table"}))
      ->envname("QNASH_FORMAT");
  app.add_option("--tol", config.tol, "Tolerance for reported condition checks")
      ->check(CLI::PositiveNumber)
      ->envname("QNASH_TOL");
  app.add_option("--seed", config.seed, "Seed for randomized restarts")->envname("QNASH_SEED");
  app.add_option("--max-iter", config.max_iter, "Nash-map iterations per restart")
      ->check(CLI::PositiveNumber)
      ->envname("QNASH_MAX_ITER");
  app.add_option("--damping", config.damping, "Nash-map damping in (0, 1]")
      ->check(CLI::Range(1e-6, 1.0))
      ->envname("QNASH_DAMPING");
  app.add_option("--restarts", config.restarts, "Randomized restarts")->envname("QNASH_RESTARTS");
  app.add_option("--theta", config.theta, "Securitization scale for default securities")
      ->check(CLI::PositiveNumber)
      ->envname("QNASH_THETA");
  app.add_option("--method", config.method, "Equilibrium solver")
      ->check(CLI::IsMember({"iterative", "support_enum"}))
      ->envname("QNASH_METHOD");
  bool no_timing = false;
  app.add_flag("--no-timing", no_timing, "Omit timing_ms for byte-stable reports")
      ->envname("QNASH_NO_TIMING");

  const std::map<std::string, std::string> commands = {
      {"solve", "Equilibrium pricing matrices and present values (GAME)"},
      {"lottery", "Entangled lottery, reduced density operators and beliefs (GAME)"},
      {"economy", "Pareto allocation and price-condition checks (GAME ECONOMY)"},
      {"price", "Security prices and market completeness (GAME [SECURITIES])"},
      {"portfolio", "Optimal holdings and Pareto check (GAME [SECURITIES])"},
      {"demo", "Full pipeline on the bundled or given game ([GAME])"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("inputs", config.inputs, "Specification files")->check(CLI::ExistingFile);
    sub->callback([&config, n = name] { config.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qnash::kExitInvalid;
  }
  config.format = format == "table" ? qnash::OutputFormat::kTable : qnash::OutputFormat::kJson;
  config.timing = !no_timing;
  return qnash::run(config, std::cout, std::cerr);
}
