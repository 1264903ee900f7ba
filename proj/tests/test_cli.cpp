#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "qnash/report.hpp"

using namespace qnash;
using nlohmann::json;

namespace {

const std::string kData = QNASH_DATA_DIR;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_in_process(RunConfig c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(const std::string& cmd, std::vector<std::string> files) {
  RunConfig c;
  c.command = cmd;
  for (auto& f : files) c.inputs.push_back(kData + "/" + f);
  c.timing = false;
  return c;
}

// Runs the installed executable through the shell; returns exit code and stdout.
std::pair<int, std::string> shell(const std::string& args) {
  const std::string cmd = std::string(QNASH_CLI) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("solve reports the two-company equilibrium") {
  const auto o = run_in_process(config("solve", {"two_company.json"}));
  REQUIRE(o.code == kExitOk);
  const auto r = json::parse(o.out);
  const auto& eq = r["results"]["equilibrium"];
  CHECK(eq["pricing_matrices"]["A"][0].get<double>() == doctest::Approx(0.3125).epsilon(1e-9));
  CHECK(eq["pricing_matrices"]["A"][1].get<double>() == doctest::Approx(0.6875).epsilon(1e-9));
  CHECK(eq["pricing_matrices"]["B"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(eq["present_values"]["A"].get<double>() == doctest::Approx(1.75).epsilon(1e-9));
  CHECK(eq["present_values"]["B"].get<double>() == doctest::Approx(2.15625).epsilon(1e-9));
  CHECK(eq["paths"] == json{"B0A0", "B0A1", "B1A0", "B1A1"});
  CHECK(r["tool"] == "qnash");
  CHECK(r["status"] == "ok");
  CHECK_FALSE(r.contains("timing_ms"));

  auto se = config("solve", {"two_company.json"});
  se.method = "support_enum";
  const auto s = json::parse(run_in_process(se).out);
  CHECK(s["results"]["equilibrium"]["method"] == "SUPPORT_ENUM");
}

TEST_CASE("one-path game solves to its vertex") {
  const auto o = run_in_process(config("solve", {"one_path.json"}));
  REQUIRE(o.code == kExitOk);
  const auto eq = json::parse(o.out)["results"]["equilibrium"];
  CHECK(eq["epsilon"].get<double>() == 0.0);
  CHECK(eq["present_values"]["X"].get<double>() == doctest::Approx(3 * 0.95));
}

TEST_CASE("price reports securitized present values and completeness") {
  auto c = config("price", {"two_company.json"});
  c.theta = 1.0;
  const auto o = run_in_process(c);
  REQUIRE(o.code == kExitOk);
  const auto p = json::parse(o.out)["results"]["price"];
  CHECK(p["securities"][0]["price"].get<double>() == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(p["securities"][1]["price"].get<double>() == doctest::Approx(2.15625).epsilon(1e-12));
  CHECK(p["completeness"]["rank"] == 2);
  CHECK(p["completeness"]["states"] == 4);
  CHECK(p["completeness"]["complete"] == false);
}

TEST_CASE("economy, portfolio and demo pipelines") {
  const auto e = run_in_process(config("economy", {"two_company.json", "economy.json"}));
  REQUIRE(e.code == kExitOk);
  const auto er = json::parse(e.out)["results"]["economy"];
  CHECK(er["mrs_check"]["pass"] == true);
  CHECK(er["quantum_price_check"]["pass"] == true);

  const auto u = run_in_process(config("economy", {"two_company.json", "economy_uneven.json"}));
  CHECK(u.code == kExitOk);  // failed condition checks are reported, not fatal
  CHECK(json::parse(u.out)["results"]["economy"]["quantum_price_check"]["pass"] == false);

  const auto pf = run_in_process(config("portfolio", {"two_company.json", "securities.json"}));
  REQUIRE(pf.code == kExitOk);
  const auto agents = json::parse(pf.out)["results"]["portfolio"]["agents"];
  REQUIRE(agents.size() == 2);
  CHECK(agents[0]["pareto_check"]["applicable"] == true);
  CHECK(agents[0]["pareto_check"]["weighted_pass"] == true);
  CHECK(agents[1]["pareto_check"]["applicable"] == true);

  const auto bond = run_in_process(config("portfolio", {"two_company.json", "securities_bond.json"}));
  REQUIRE(bond.code == kExitOk);
  CHECK(json::parse(bond.out)["results"]["portfolio"]["agents"][0]["pareto_check"]["pass"] == true);

  RunConfig demo;
  demo.command = "demo";
  demo.timing = false;
  const auto d = run_in_process(demo);
  REQUIRE(d.code == kExitOk);
  const auto dr = json::parse(d.out)["results"];
  for (const char* key : {"equilibrium", "lottery", "price", "portfolio", "economy"}) CHECK(dr.contains(key));
}

TEST_CASE("exit codes") {
  CHECK(run_in_process(config("solve", {"missing.json"})).code == kExitInvalid);
  CHECK(run_in_process(config("economy", {"two_company.json"})).code == kExitInvalid);
  CHECK(run_in_process(config("solve", {"two_company.json", "economy.json"})).code == kExitInvalid);
  CHECK(run_in_process(config("frobnicate", {"two_company.json"})).code == kExitInvalid);
  auto bad_method = config("solve", {"two_company.json"});
  bad_method.method = "guess";
  CHECK(run_in_process(bad_method).code == kExitInvalid);

  // Starved solver without restarts cannot certify an equilibrium.
  auto starved = config("solve", {"two_company.json"});
  starved.max_iter = 1;
  starved.restarts = 0;
  const auto s = run_in_process(starved);
  if (s.code != kExitOk) {
    CHECK(s.code == kExitUncertified);
    CHECK(json::parse(s.out)["status"] == "uncertified");
  }

  const auto o = run_in_process(config("economy", {"two_company.json", "one_path.json"}));
  CHECK(o.code == kExitInvalid);
  CHECK(o.err.find("VALIDATION_ERROR") != std::string::npos);
}

TEST_CASE("reports are deterministic and round-trip") {
  for (const char* cmd : {"solve", "lottery", "price", "portfolio", "demo"}) {
    auto c = config(cmd, {"two_company.json"});
    c.seed = 5;
    const auto a = run_in_process(c), b = run_in_process(c);
    CHECK(a.out == b.out);
    const auto parsed = json::parse(a.out);
    CHECK(json::parse(parsed.dump()) == parsed);
    CHECK(parsed.dump(2) + "\n" == a.out);
  }
  auto timed = config("solve", {"two_company.json"});
  timed.timing = true;
  CHECK(json::parse(run_in_process(timed).out).contains("timing_ms"));
}

TEST_CASE("table output is derived from the report") {
  auto c = config("solve", {"two_company.json"});
  c.format = OutputFormat::kTable;
  const auto o = run_in_process(c);
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("results.equilibrium.present_values.A") != std::string::npos);
  CHECK(o.out.find("1.75") != std::string::npos);
}

TEST_CASE("executable flags and environment overrides") {
  const std::string game = kData + "/two_company.json";
  auto [code, out] = shell("solve " + game + " --no-timing");
  CHECK(code == 0);
  CHECK(json::parse(out)["config"]["seed"] == 0);

  std::tie(code, out) = shell("solve " + game + " --no-timing --seed 9 --tol 1e-7");
  CHECK(json::parse(out)["config"]["seed"] == 9);
  CHECK(json::parse(out)["config"]["tol"] == 1e-7);

  std::tie(code, out) = shell("price " + game + " --no-timing --theta 0.5");
  CHECK(json::parse(out)["results"]["price"]["securities"][0]["price"].get<double>() == doctest::Approx(0.875));

  std::tie(code, out) = shell("--format table price " + game + " --no-timing");
  CHECK(out.find("results.price.completeness.rank") != std::string::npos);

  std::tie(code, out) = shell("solve " + game);
  CHECK(json::parse(out).contains("timing_ms"));

  std::tie(code, out) = std::pair{0, std::string()};
  {
    const std::string env = "QNASH_SEED=4 QNASH_THETA=2 QNASH_FORMAT=json QNASH_NO_TIMING=1 ";
    const std::string cmd = env + QNASH_CLI + std::string(" price ") + game + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  }
  const auto r = json::parse(out);
  CHECK(r["config"]["seed"] == 4);
  CHECK(r["config"]["theta"] == 2.0);
  CHECK_FALSE(r.contains("timing_ms"));

  CHECK(shell("solve " + kData + "/missing.json").first == 2);
  CHECK(shell("solve " + game + " --damping 7").first == 2);
  CHECK(shell("").first == 2);
  CHECK(shell("--version").first == 0);
}
