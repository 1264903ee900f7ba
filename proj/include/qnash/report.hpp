#pragma once

// Command orchestration shared by the qnash executable and its tests.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace qnash {

enum class OutputFormat { kJson, kTable };

struct RunConfig {
  std::string command;              // solve | lottery | economy | price | portfolio | demo
  std::vector<std::string> inputs;  // game file first, then the module file if any
  OutputFormat format = OutputFormat::kJson;
  double tol = 1e-8;                // tolerance for reported condition checks
  std::uint64_t seed = 0;
  std::size_t max_iter = 5000;
  double damping = 0.5;
  std::size_t restarts = 20;
  double theta = 1.0;
  std::string method = "iterative";  // iterative | support_enum
  bool timing = true;               // false drops timing_ms for byte-stable output
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitUncertified = 3;

// Builds the report for `config`. Throws qnash::Error on bad input or solver failure.
nlohmann::json build_report(const RunConfig& config);

// Runs a command end to end: report on `out`, diagnostics on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Flattens a JSON document into aligned "path  value" rows.
std::string render_table(const nlohmann::json& report);

// Built-in two-company game used by `demo` when no game file is given.
nlohmann::json two_company_game();

}  // namespace qnash
