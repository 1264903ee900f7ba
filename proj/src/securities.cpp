#include "qnash/securities.hpp"

#include <algorithm>
#include <cmath>

#include "qnash/error.hpp"
#include "qnash/kernels.hpp"

namespace qnash {

void SecuritySet::validate(std::size_t state_count, const GameSpec* game) const {
  for (std::size_t j = 0; j < securities.size(); ++j) {
    const std::string base = "securities[" + std::to_string(j) + "]";
    const auto& s = securities[j];
    if (s.payoffs.size() != state_count) {
      throw Error(ErrorCode::kValidationError,
                  "expected " + std::to_string(state_count) + " payoffs, got " +
                      std::to_string(s.payoffs.size()),
                  base + ".payoffs");
    }
    for (double x : s.payoffs) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::kValidationError, "payoff is not finite", base + ".payoffs");
      }
    }
    if (s.position && game != nullptr) {
      if (s.position->player >= game->player_count()) {
        throw Error(ErrorCode::kValidationError, "unknown player", base + ".game_position");
      }
      const auto pay = game->payoffs(s.position->player);
      for (std::size_t w = 0; w < state_count; ++w) {
        if (std::abs(s.payoffs[w] - s.position->theta * pay[w]) > 1e-12 * (1.0 + std::abs(pay[w]))) {
          throw Error(ErrorCode::kValidationError, "payoff differs from theta * game payoff",
                      base + ".payoffs");
        }
      }
    }
  }
}

Eigen::MatrixXd SecuritySet::payoff_matrix() const {
  const auto m = static_cast<Eigen::Index>(securities.size());
  const auto n = m == 0 ? 0 : static_cast<Eigen::Index>(securities.front().payoffs.size());
  Eigen::MatrixXd x(m, n);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index w = 0; w < n; ++w) x(j, w) = securities[j].payoffs[w];
  }
  return x;
}

SecuritySet securitize(const GameSpec& spec, double theta) {
  if (!(theta > 0.0)) {
    throw Error(ErrorCode::kValidationError, "theta must be positive", "theta");
  }
  SecuritySet set;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    Security s;
    s.name = spec.player(i).name;
    for (double p : spec.payoffs(i)) s.payoffs.push_back(theta * p);
    s.position = GamePosition{i, theta};
    set.securities.push_back(std::move(s));
  }
  return set;
}

double security_expected_payoff(const DensityOperator& rho_lottery, const Security& security) {
  if (static_cast<std::size_t>(rho_lottery.matrix.rows()) != security.payoffs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "density operator and payoff differ in size");
  }
  const auto diag = rho_lottery.diagonal();
  return kernels::dot(diag, security.payoffs);
}

double price_security(const Security& security, const JointKet& ket, double discount) {
  if (ket.path_count() != security.payoffs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "ket and payoff differ in size");
  }
  const auto bel = rational_beliefs(ket, discount);
  return discount * kernels::dot(security.payoffs, bel);
}

MarketPrices price_securities(const SecuritySet& set, const JointKet& ket, double discount) {
  MarketPrices out;
  for (const auto& s : set.securities) out.push_back(price_security(s, ket, discount));
  return out;
}

CompletenessReport market_completeness(const SecuritySet& set, std::size_t states) {
  set.validate(states);
  CompletenessReport r;
  r.states = states;
  if (set.size() == 0 || states == 0) return r;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(set.payoff_matrix());
  const auto& sv = svd.singularValues();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff = 1e-10 * sv(0);
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff && sv(k) > 0.0) ++r.rank;
  }
  r.complete = r.rank == states;
  return r;
}

namespace {

struct PortfolioProblem {
  const UtilitySpec& u;
  Eigen::MatrixXd x;      // m x N
  Eigen::VectorXd price;  // m
  std::vector<double> bel;
  double wealth;

  double c0(const Eigen::VectorXd& s) const { return wealth - price.dot(s); }
  Eigen::VectorXd consumption(const Eigen::VectorXd& s) const { return x.transpose() * s; }

  bool interior(const Eigen::VectorXd& s) const {
    if (!(c0(s) > 0.0)) return false;
    const Eigen::VectorXd c = consumption(s);
    for (Eigen::Index w = 0; w < c.size(); ++w) {
      if (bel[w] > 0.0 && !(c(w) > 0.0)) return false;
    }
    return true;
  }

  double objective(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd c = consumption(s);
    double acc = u.value(c0(s));
    for (Eigen::Index w = 0; w < c.size(); ++w) {
      if (bel[w] > 0.0) acc += u.beta * bel[w] * u.value(c(w));
    }
    return acc;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd c = consumption(s);
    Eigen::VectorXd g = -u.marginal(c0(s)) * price;
    for (Eigen::Index w = 0; w < c.size(); ++w) {
      if (bel[w] > 0.0) g += u.beta * bel[w] * u.marginal(c(w)) * x.col(w);
    }
    return g;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd c = consumption(s);
    Eigen::MatrixXd h = u.second_derivative(c0(s)) * price * price.transpose();
    for (Eigen::Index w = 0; w < c.size(); ++w) {
      if (bel[w] > 0.0) h += u.beta * bel[w] * u.second_derivative(c(w)) * x.col(w) * x.col(w).transpose();
    }
    return h;
  }

  // First-order residual per security.
  Eigen::VectorXd foc(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd c = consumption(s);
    double denom = 0.0;
    for (double b : bel) denom += b * u.d_present(c0(s));
    Eigen::VectorXd r = -price;
    for (Eigen::Index w = 0; w < c.size(); ++w) {
      if (bel[w] > 0.0) r += (bel[w] * u.d_future(c(w)) / denom) * x.col(w);
    }
    return r;
  }
};

}  // namespace

Portfolio solve_portfolio(const PortfolioAgent& agent, const SecuritySet& set,
                          const MarketPrices& prices, const std::vector<double>& beliefs,
                          const PortfolioConfig& config) {
  agent.utility.validate();
  const std::size_t m = set.size();
  const std::size_t states = beliefs.size();
  set.validate(states);
  if (m == 0) throw Error(ErrorCode::kInfeasibleBudget, "no securities");
  if (prices.size() != m || agent.endowment_shares.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "prices and endowments need one entry per security");
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto& pay = set.securities[j].payoffs;
    const bool zero = std::all_of(pay.begin(), pay.end(), [](double v) { return v == 0.0; });
    if (zero && prices[j] != 0.0) {
      throw Error(ErrorCode::kInfeasibleBudget,
                  "security '" + set.securities[j].name + "' pays nothing but has price " +
                      std::to_string(prices[j]));
    }
  }

  PortfolioProblem prob{agent.utility, set.payoff_matrix(),
                        Eigen::Map<const Eigen::VectorXd>(prices.data(), m), beliefs, 0.0};
  const Eigen::Map<const Eigen::VectorXd> shares(agent.endowment_shares.data(), m);
  prob.wealth = agent.endowment_c0 + prob.price.dot(shares);
  if (!(prob.wealth > 0.0)) {
    throw Error(ErrorCode::kInfeasibleBudget,
                "endowment value " + std::to_string(prob.wealth) + " is not positive");
  }

  // Starting point: endowment if interior, else a scaled portfolio with
  // positive payoff in every believed state.
  Eigen::VectorXd s = shares;
  if (!prob.interior(s)) {
    std::vector<Eigen::VectorXd> directions;
    std::vector<Eigen::Index> support;
    for (std::size_t w = 0; w < states; ++w) {
      if (beliefs[w] > 0.0) support.push_back(static_cast<Eigen::Index>(w));
    }
    Eigen::MatrixXd xs(support.size(), m);
    for (std::size_t k = 0; k < support.size(); ++k) xs.row(k) = prob.x.col(support[k]).transpose();
    directions.push_back(xs.completeOrthogonalDecomposition().solve(
        Eigen::VectorXd::Ones(static_cast<Eigen::Index>(support.size()))));
    directions.push_back(Eigen::VectorXd::Ones(m));
    for (std::size_t j = 0; j < m; ++j) {
      directions.push_back(Eigen::VectorXd::Unit(m, j));
      directions.push_back(-Eigen::VectorXd::Unit(m, j));
    }
    bool found = false;
    for (const auto& d : directions) {
      const Eigen::VectorXd pay = xs * d;
      if (pay.size() > 0 && !(pay.minCoeff() > 0.0)) continue;
      const double cost = prob.price.dot(d);
      if (!(cost > 0.0)) {
        throw Error(ErrorCode::kInfeasibleBudget,
                    "arbitrage: positive payoff portfolio with non-positive cost");
      }
      s = (0.5 * prob.wealth / cost) * d;
      found = prob.interior(s);
      if (found) break;
    }
    if (!found) {
      throw Error(ErrorCode::kInfeasibleBudget,
                  "no portfolio yields positive consumption in every believed state");
    }
  }

  Portfolio out;
  double f = prob.objective(s);
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    out.iterations = it + 1;
    const Eigen::VectorXd g = prob.gradient(s);
    const double scale = prob.u.marginal(prob.c0(s)) * (1.0 + prob.price.cwiseAbs().maxCoeff());
    if (g.cwiseAbs().maxCoeff() <= config.tol * scale) break;
    const Eigen::MatrixXd h = prob.hessian(s);
    Eigen::VectorXd step = (-h).completeOrthogonalDecomposition().solve(g);
    if (!step.allFinite() || g.dot(step) <= 0.0) step = g;
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Eigen::VectorXd trial = s + t * step;
      if (!prob.interior(trial)) continue;
      const double ft = prob.objective(trial);
      if (ft >= f + 1e-4 * t * g.dot(step) || ft >= f) {
        s = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  out.holdings.assign(s.data(), s.data() + s.size());
  out.c0 = prob.c0(s);
  const Eigen::VectorXd c = prob.consumption(s);
  out.consumption.assign(c.data(), c.data() + c.size());
  out.budget_residual =
      std::abs(out.c0 + prob.price.dot(s) - (agent.endowment_c0 + prob.price.dot(shares)));
  const Eigen::VectorXd r = prob.foc(s);
  out.foc_residuals.assign(r.data(), r.data() + r.size());
  out.max_foc_residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  if (!(out.max_foc_residual <= 1e-8)) {
    throw Error(ErrorCode::kNoInteriorOptimum,
                "portfolio first-order residual " + std::to_string(out.max_foc_residual) +
                    " after " + std::to_string(out.iterations) + " iterations");
  }
  return out;
}

ParetoConditionReport check_pareto_condition(const PortfolioAgent& agent,
                                             const SecuritySet& set, const Portfolio& portfolio,
                                             const MarketPrices& prices,
                                             const std::vector<double>& beliefs,
                                             const JointKet& ket, double discount, double tol) {
  const auto rational = rational_beliefs(ket, discount);
  if (rational.size() != beliefs.size()) {
    throw Error(ErrorCode::kPreconditionViolation, "belief vector has wrong length");
  }
  for (std::size_t w = 0; w < beliefs.size(); ++w) {
    if (std::abs(beliefs[w] - rational[w]) > Tolerances{}.construction) {
      throw Error(ErrorCode::kPreconditionViolation, "beliefs are not the rational beliefs");
    }
  }
  const auto pv = price_securities(set, ket, discount);
  if (pv.size() != prices.size()) {
    throw Error(ErrorCode::kPreconditionViolation, "price vector has wrong length");
  }
  for (std::size_t j = 0; j < pv.size(); ++j) {
    if (std::abs(pv[j] - prices[j]) > Tolerances{}.construction * (1.0 + std::abs(pv[j]))) {
      throw Error(ErrorCode::kPreconditionViolation,
                  "price of '" + set.securities[j].name + "' is not its present value");
    }
  }

  const auto& u = agent.utility;
  ParetoConditionReport r;
  // D * sum_w (phi_w / D) * u'_0 with phi_w = |psi(f_w, w)|^2 = D * bel(w).
  double rhs = 0.0;
  for (std::size_t w = 0; w < beliefs.size(); ++w) {
    rhs += discount * rational[w] * u.d_present(portfolio.c0);
  }
  r.residuals.assign(beliefs.size(), 0.0);
  for (std::size_t w = 0; w < beliefs.size(); ++w) {
    if (rational[w] == 0.0) {
      r.excluded_states.push_back(w);
      continue;
    }
    r.residuals[w] = std::abs(u.d_future(portfolio.consumption[w]) - rhs) / rhs;
    r.max_residual = std::max(r.max_residual, r.residuals[w]);
  }
  r.pass = r.max_residual <= tol;

  for (const auto& sec : set.securities) {
    double acc = 0.0;
    for (std::size_t w = 0; w < beliefs.size(); ++w) {
      if (rational[w] == 0.0) continue;
      const double phi = discount * rational[w];
      acc += phi * sec.payoffs[w] * (u.d_future(portfolio.consumption[w]) / rhs - 1.0);
    }
    r.weighted_residuals.push_back(acc);
    r.max_weighted_residual = std::max(r.max_weighted_residual, std::abs(acc));
  }
  r.weighted_pass = r.max_weighted_residual <= tol;
  return r;
}

}  // namespace qnash
