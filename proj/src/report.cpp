#include "qnash/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

#include "qnash/economy.hpp"
#include "qnash/equilibrium.hpp"
#include "qnash/error.hpp"
#include "qnash/game.hpp"
#include "qnash/lottery.hpp"
#include "qnash/securities.hpp"
#include "qnash/spec_io.hpp"

namespace qnash {

using nlohmann::json;

namespace {

// Matrices are emitted only up to this dimension; larger ones keep summaries.
constexpr std::size_t kMaxEmittedMatrix = 64;

json complex_vector(std::span<const cplx> v) {
  json re = json::array(), im = json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"re", re}, {"im", im}};
}

json complex_matrix(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

struct Context {
  const RunConfig& config;
  GameSpec game;
  json input;
  json results = json::object();
  bool certified = true;
};

GameSpec load_game(const RunConfig& config, json& input) {
  json doc;
  if (config.inputs.empty()) {
    if (config.command != "demo") {
      throw Error(ErrorCode::kValidationError, "a game specification file is required", "inputs");
    }
    doc = two_company_game();
    input["files"] = json::array();
  } else {
    doc = read_json_file(config.inputs.front());
    input["files"] = config.inputs;
  }
  GameSpec game = parse_game(doc);
  input["game"] = game_to_json(game);
  return game;
}

json module_doc(const RunConfig& config, const std::string& what) {
  if (config.inputs.size() < 2) return nullptr;
  if (config.inputs.size() > 2) {
    throw Error(ErrorCode::kValidationError, "expected a game file and at most one " + what + " file",
                "inputs");
  }
  return read_json_file(config.inputs[1]);
}

EquilibriumResult solve_game(Context& ctx) {
  const auto& cfg = ctx.config;
  const GameSpec& game = ctx.game;
  json out;
  EquilibriumResult eq;
  if (cfg.method == "support_enum") {
    const auto outcome = solve_support_enum(game);
    json all = json::array();
    for (const auto& e : outcome.equilibria) all.push_back(e.profile.weights);
    out["all_equilibria"] = all;
    out["skipped_supports"] = outcome.skipped.size();
    if (outcome.equilibria.empty()) {
      throw Error(ErrorCode::kNoInteriorSolution, "support enumeration found no equilibrium");
    }
    eq = outcome.equilibria.front();
  } else if (cfg.method == "iterative") {
    IterativeConfig ic;
    ic.max_iter = cfg.max_iter;
    ic.damping = cfg.damping;
    ic.restarts = cfg.restarts;
    ic.seed = cfg.seed;
    const auto outcome = solve_iterative(game, ic);
    eq = outcome.result;
    out["distinct_equilibria"] = outcome.distinct.size();
  } else {
    throw Error(ErrorCode::kValidationError, "unknown method '" + cfg.method + "'", "method");
  }

  out["method"] = std::string(to_string(eq.method));
  out["certified"] = eq.certified;
  out["polished"] = eq.polished;
  out["epsilon"] = eq.epsilon;
  out["iterations"] = eq.iterations;
  json matrices = json::object(), pv = json::object();
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    matrices[game.player(i).name] = eq.profile.weights[i];
    pv[game.player(i).name] = eq.pv[i];
  }
  out["pricing_matrices"] = matrices;
  out["present_values"] = pv;
  json labels = json::array();
  for (std::size_t k = 0; k < game.path_count(); ++k) labels.push_back(game.path_label(k));
  out["paths"] = labels;
  out["ket"] = complex_vector(eq.ket.amplitudes());
  out["capitalized_prices"] = eq.ket.capitalized_prices();
  const auto verify = verify_equilibrium(game, eq.profile, cfg.tol);
  out["verification"] = {{"tol", cfg.tol}, {"ok", verify.ok}, {"worst_gain", verify.worst_gain}};
  if (game.player_count() == 2) out["schmidt_rank"] = schmidt_rank(game, eq.ket);
  if (!game.warnings().empty()) out["warnings"] = game.warnings();

  ctx.certified = ctx.certified && eq.certified;
  ctx.results["equilibrium"] = out;
  return eq;
}

json density_json(const DensityOperator& rho) {
  json j;
  j["trace"] = rho.trace();
  j["hermitian"] = rho.is_hermitian(Tolerances{}.property);
  j["diagonal"] = rho.diagonal();
  j["spectrum"] = rho.spectrum();
  j["rank"] = rho.rank();
  if (rho.matrix.rows() <= static_cast<Eigen::Index>(kMaxEmittedMatrix)) {
    j["matrix"] = complex_matrix(rho.matrix);
  }
  return j;
}

struct LotteryState {
  JointKet joint;
  std::vector<double> beliefs;
};

LotteryState run_lottery(Context& ctx, const EquilibriumResult& eq) {
  LotteryState st{entangle(eq.ket), {}};
  st.beliefs = rational_beliefs(st.joint, ctx.game.discount());
  json out;
  out["rational_beliefs"] = st.beliefs;
  if (ctx.game.path_count() <= kMaxDensityDim) {
    const auto rho_game = trace_out_lottery(st.joint);
    const auto rho_lottery = trace_out_game(st.joint);
    out["rho_game"] = density_json(rho_game);
    out["rho_lottery"] = density_json(rho_lottery);
    const auto sg = rho_game.spectrum();
    const auto sl = rho_lottery.spectrum();
    double gap = 0.0;
    for (std::size_t k = 0; k < sg.size(); ++k) gap = std::max(gap, std::abs(sg[k] - sl[k]));
    out["spectrum_gap"] = gap;
  } else {
    out["density_omitted"] = "path count above " + std::to_string(kMaxDensityDim);
  }
  ctx.results["lottery"] = out;
  return st;
}

EconomySpec demo_economy(const GameSpec& game, const std::vector<double>& beliefs) {
  // Aggregates constant over time and beta equal to D keep the price conditions attainable.
  const double d = game.discount();
  EconomySpec e;
  e.aggregate_c0 = 4.0;
  e.aggregate_c.assign(game.path_count(), 4.0);
  e.agents.push_back({UtilitySpec{1.0, d}, 1.0, beliefs});
  e.agents.push_back({UtilitySpec{2.0, d}, 1.0, beliefs});
  e.validate();
  return e;
}

void run_economy(Context& ctx, const EconomySpec& economy, const LotteryState& st) {
  const double tol = ctx.config.tol;
  const Allocation alloc = solve_pareto(economy);
  json out;
  json plans = json::array();
  for (std::size_t i = 0; i < alloc.plans.size(); ++i) {
    plans.push_back({{"c0", alloc.plans[i].c0},
                     {"c", alloc.plans[i].c},
                     {"expected_utility",
                      expected_utility(economy.agents[i].utility, economy.agents[i].beliefs,
                                       alloc.plans[i])}});
  }
  out["agents"] = economy.agents.size();
  out["allocation"] = plans;
  out["state_prices"] = alloc.state_prices();
  out["welfare"] = welfare(economy, alloc);
  out["iterations"] = alloc.iterations;
  const auto foc = foc_residuals(economy, alloc);
  out["foc_residuals"] = {{"present", foc.present},
                          {"contingent", foc.contingent},
                          {"feasibility", foc.feasibility}};
  const auto mrs = check_mrs_equality(economy, alloc, tol);
  out["mrs_check"] = {{"pass", mrs.pass}, {"max_deviation", mrs.max_deviation}, {"mrs", mrs.mrs}};
  try {
    const auto q = check_quantum_price_conditions(economy, alloc, st.joint, ctx.game.discount(), tol);
    out["quantum_price_check"] = {{"applicable", true},
                                  {"pass", q.pass},
                                  {"price_residual", q.price_residual},
                                  {"marginal_residual", q.marginal_residual},
                                  {"excluded_states", q.excluded_states}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBeliefMismatch) throw;
    out["quantum_price_check"] = {{"applicable", false}, {"reason", e.what()}};
  }
  ctx.results["economy"] = out;
}

struct Market {
  SecuritySet set;
  MarketPrices prices;
  std::vector<SecuritiesInput::Agent> agents;
};

Market run_price(Context& ctx, const LotteryState& st, const json& doc) {
  Market m;
  json out;
  if (doc.is_null()) {
    m.set = securitize(ctx.game, ctx.config.theta);
    out["source"] = "securitized";
    out["theta"] = ctx.config.theta;
  } else {
    auto parsed = parse_securities(doc, ctx.game);
    m.set = std::move(parsed.securities);
    m.agents = std::move(parsed.agents);
    if (parsed.prices) m.prices = *parsed.prices;
    out["source"] = "file";
  }
  const auto pv = price_securities(m.set, st.joint, ctx.game.discount());
  if (m.prices.empty()) m.prices = pv;
  json secs = json::array();
  for (std::size_t j = 0; j < m.set.size(); ++j) {
    secs.push_back({{"name", m.set.securities[j].name},
                    {"payoffs", m.set.securities[j].payoffs},
                    {"present_value", pv[j]},
                    {"price", m.prices[j]}});
  }
  out["securities"] = secs;
  const auto comp = market_completeness(m.set, ctx.game.path_count());
  out["completeness"] = {{"rank", comp.rank},
                         {"states", comp.states},
                         {"complete", comp.complete},
                         {"singular_values", comp.singular_values}};
  ctx.results["price"] = out;
  return m;
}

void run_portfolio(Context& ctx, Market& market, const LotteryState& st) {
  if (market.agents.empty()) {
    SecuritiesInput::Agent a;
    a.agent.utility = UtilitySpec{1.0, ctx.game.discount()};
    a.agent.endowment_c0 = 1.0;
    a.agent.endowment_shares.assign(market.set.size(), 1.0);
    market.agents.push_back(std::move(a));
  }
  json rows = json::array();
  for (const auto& a : market.agents) {
    const auto beliefs = a.beliefs.value_or(st.beliefs);
    const auto pf = solve_portfolio(a.agent, market.set, market.prices, beliefs);
    json row;
    row["utility"] = {{"gamma", a.agent.utility.gamma}, {"beta", a.agent.utility.beta}};
    row["endowment"] = {{"c0", a.agent.endowment_c0}, {"shares", a.agent.endowment_shares}};
    row["rational_beliefs"] = !a.beliefs.has_value();
    row["c0"] = pf.c0;
    row["holdings"] = pf.holdings;
    row["consumption"] = pf.consumption;
    row["budget_residual"] = pf.budget_residual;
    row["foc_residuals"] = pf.foc_residuals;
    row["iterations"] = pf.iterations;
    try {
      const auto rep = check_pareto_condition(a.agent, market.set, pf, market.prices, beliefs,
                                              st.joint, ctx.game.discount(), ctx.config.tol);
      row["pareto_check"] = {{"applicable", true},
                             {"pass", rep.pass},
                             {"max_residual", rep.max_residual},
                             {"residuals", rep.residuals},
                             {"excluded_states", rep.excluded_states},
                             {"weighted_pass", rep.weighted_pass},
                             {"max_weighted_residual", rep.max_weighted_residual}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPreconditionViolation) throw;
      row["pareto_check"] = {{"applicable", false}, {"reason", e.what()}};
    }
    rows.push_back(row);
  }
  ctx.results["portfolio"] = {{"agents", rows}};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoInteriorSolution:
    case ErrorCode::kNoInteriorOptimum:
    case ErrorCode::kInfeasibleBudget:
      return kExitUncertified;
    default:
      return kExitInvalid;
  }
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    for (const auto& [k, child] : v.items()) flatten(child, path.empty() ? k : path + "." + k, rows);
    return;
  }
  if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); });
    if (flat) {
      std::string s = "[";
      for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + scalar_text(v[k]);
      rows.emplace_back(path, s + "]");
      return;
    }
    for (std::size_t k = 0; k < v.size(); ++k) flatten(v[k], path + "[" + std::to_string(k) + "]", rows);
    return;
  }
  rows.emplace_back(path, scalar_text(v));
}

}  // namespace

json two_company_game() {
  return json::parse(R"({
    "players": [{"name": "A", "strategies": ["0", "1"]},
                {"name": "B", "strategies": ["0", "1"]}],
    "payoffs": {"A": [2, 1.5, 1.5, 2], "B": [1.4, 2.5, 2.5, 2]},
    "discount": 1
  })");
}

json build_report(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::string& cmd = config.command;
  if (cmd != "solve" && cmd != "lottery" && cmd != "economy" && cmd != "price" &&
      cmd != "portfolio" && cmd != "demo") {
    throw Error(ErrorCode::kValidationError, "unknown subcommand '" + cmd + "'", "command");
  }
  json input;
  Context ctx{config, load_game(config, input), {}};

  json module;
  if (cmd == "economy" && config.inputs.size() < 2) {
    throw Error(ErrorCode::kValidationError, "economy needs a game file and an economy file",
                "inputs");
  }
  if (cmd == "economy" || cmd == "price" || cmd == "portfolio") {
    module = module_doc(config, cmd == "economy" ? "economy" : "securities");
    if (!module.is_null()) input[cmd == "economy" ? "economy" : "securities"] = module;
  } else if (config.inputs.size() > 1) {
    throw Error(ErrorCode::kValidationError, cmd + " takes a single game file", "inputs");
  }
  // Parse module files before solving so schema errors surface first.
  std::optional<EconomyInput> economy_in;
  if (cmd == "economy") economy_in = parse_economy(module);
  if (!module.is_null() && cmd != "economy") parse_securities(module, ctx.game);
  ctx.input = input;

  const EquilibriumResult eq = solve_game(ctx);
  if (cmd != "solve") {
    const LotteryState st = run_lottery(ctx, eq);
    if (cmd == "economy") {
      run_economy(ctx, economy_in->resolve(st.beliefs), st);
    } else if (cmd == "price" || cmd == "portfolio" || cmd == "demo") {
      Market market = run_price(ctx, st, module);
      if (cmd != "price") run_portfolio(ctx, market, st);
      if (cmd == "demo") run_economy(ctx, demo_economy(ctx.game, st.beliefs), st);
    }
  }

  json report;
  report["tool"] = "qnash";
  report["version"] = QNASH_VERSION;
  report["command"] = cmd;
  report["status"] = ctx.certified ? "ok" : "uncertified";
  report["config"] = {{"format", config.format == OutputFormat::kJson ? "json" : "table"},
                      {"tol", config.tol},
                      {"seed", config.seed},
                      {"max_iter", config.max_iter},
                      {"damping", config.damping},
                      {"restarts", config.restarts},
                      {"theta", config.theta},
                      {"method", config.method}};
  report["input"] = ctx.input;
  report["results"] = ctx.results;
  if (config.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report["timing_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  return report;
}

std::string render_table(const json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  return os.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  json report;
  try {
    report = build_report(config);
  } catch (const Error& e) {
    err << "qnash: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "qnash: " << e.what() << '\n';
    return kExitUncertified;
  }
  if (config.format == OutputFormat::kJson) {
    out << report.dump(2) << '\n';
  } else {
    out << render_table(report);
  }
  if (report["status"] != "ok") {
    err << "qnash: equilibrium not certified (epsilon "
        << report["results"]["equilibrium"]["epsilon"].get<double>() << ")\n";
    return kExitUncertified;
  }
  return kExitOk;
}

}  // namespace qnash
