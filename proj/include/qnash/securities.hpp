#pragma once

// Securities whose payoffs are contingent on the lottery outcome, priced at
// the game's present value and held by expected-utility maximizing agents.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qnash/economy.hpp"
#include "qnash/lottery.hpp"

namespace qnash {

struct GamePosition {
  std::size_t player = 0;
  double theta = 1.0;
};

struct Security {
  std::string name;
  std::vector<double> payoffs;  // x_j(w), one per lottery state
  std::optional<GamePosition> position;
};

struct SecuritySet {
  std::vector<Security> securities;

  std::size_t size() const { return securities.size(); }
  // Throws kValidationError; with a game, GAME_POSITION payoffs are rechecked
  // against theta * payoff.
  void validate(std::size_t state_count, const GameSpec* game = nullptr) const;
  Eigen::MatrixXd payoff_matrix() const;  // m x N
};

using MarketPrices = std::vector<double>;

// One security per player paying theta * payoff_i(f_w) in state w.
SecuritySet securitize(const GameSpec& spec, double theta);

// Tr(rho_lottery x_j).
double security_expected_payoff(const DensityOperator& rho_lottery, const Security& security);

// D * sum_w x_j(w) |psi(f_w, w)|^2 / D.
double price_security(const Security& security, const JointKet& ket, double discount);
MarketPrices price_securities(const SecuritySet& set, const JointKet& ket, double discount);

struct CompletenessReport {
  std::size_t rank = 0;
  std::size_t states = 0;
  bool complete = false;
  std::vector<double> singular_values;
};

// Numerical rank counts singular values above 1e-10 * sigma_max.
CompletenessReport market_completeness(const SecuritySet& set, std::size_t states);

struct PortfolioAgent {
  UtilitySpec utility;
  double endowment_c0 = 0.0;
  std::vector<double> endowment_shares;  // w_ij
};

struct PortfolioConfig {
  std::size_t max_iter = 200;
  double tol = 1e-12;
};

struct Portfolio {
  double c0 = 0.0;
  std::vector<double> holdings;     // s_ij
  std::vector<double> consumption;  // c_iw = sum_j s_ij x_j(w)
  double budget_residual = 0.0;
  // Per security: sum_w bel u'_w x_j / sum_w bel u'_0 - S_j.
  std::vector<double> foc_residuals;
  double max_foc_residual = 0.0;
  std::size_t iterations = 0;
};

// Maximizes expected utility subject to the time-0 budget. Only states with
// positive belief constrain consumption to be positive.
// Throws kInfeasibleBudget or kNoInteriorOptimum.
Portfolio solve_portfolio(const PortfolioAgent& agent, const SecuritySet& set,
                          const MarketPrices& prices, const std::vector<double>& beliefs,
                          const PortfolioConfig& config = {});

struct ParetoConditionReport {
  bool pass = false;
  // Relative residual of u'_w = D sum_w (phi_w / D) u'_0 per state; zero for
  // excluded states.
  std::vector<double> residuals;
  double max_residual = 0.0;
  std::vector<std::size_t> excluded_states;
  // Weaker condition, per security: sum_w phi_w x_j(w) (u'_w / rhs - 1), which
  // equals the portfolio first-order residual at present-value prices.
  std::vector<double> weighted_residuals;
  double max_weighted_residual = 0.0;
  bool weighted_pass = false;
};

// Throws kPreconditionViolation unless beliefs are the rational beliefs of
// `ket` and prices are its present values.
ParetoConditionReport check_pareto_condition(const PortfolioAgent& agent,
                                             const SecuritySet& set, const Portfolio& portfolio,
                                             const MarketPrices& prices,
                                             const std::vector<double>& beliefs,
                                             const JointKet& ket, double discount, double tol);

}  // namespace qnash
