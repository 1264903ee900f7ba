#include "qnash/economy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnash/error.hpp"

namespace qnash {

void UtilitySpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::kValidationError, "gamma must be positive", "gamma");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kValidationError, "beta must be positive", "beta");
  }
}

double UtilitySpec::value(double c) const {
  if (c < 0.0 || (c == 0.0 && gamma >= 1.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kDomainError,
                "consumption " + std::to_string(c) + " outside utility domain");
  }
  if (gamma == 1.0) return std::log(c);
  return (std::pow(c, 1.0 - gamma) - 1.0) / (1.0 - gamma);
}

double UtilitySpec::marginal(double c) const { return std::pow(c, -gamma); }

double UtilitySpec::second_derivative(double c) const {
  return -gamma * std::pow(c, -gamma - 1.0);
}

double UtilitySpec::inverse_marginal(double m) const { return std::pow(m, -1.0 / gamma); }

void EconomySpec::validate(double tol) const {
  if (agents.empty()) throw Error(ErrorCode::kValidationError, "no agents", "agents");
  if (!(aggregate_c0 > 0.0) || !std::isfinite(aggregate_c0)) {
    throw Error(ErrorCode::kValidationError, "must be positive", "aggregate_c0");
  }
  if (aggregate_c.empty()) {
    throw Error(ErrorCode::kValidationError, "at least one state required", "aggregate_c");
  }
  for (std::size_t w = 0; w < aggregate_c.size(); ++w) {
    if (!(aggregate_c[w] > 0.0) || !std::isfinite(aggregate_c[w])) {
      throw Error(ErrorCode::kValidationError, "must be positive",
                  "aggregate_c[" + std::to_string(w) + "]");
    }
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string base = "agents[" + std::to_string(i) + "]";
    const auto& a = agents[i];
    try {
      a.utility.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidationError, "invalid utility", base + "." + e.field());
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::kValidationError, "must be positive", base + ".lambda");
    }
    if (a.beliefs.size() != aggregate_c.size()) {
      throw Error(ErrorCode::kValidationError,
                  "expected " + std::to_string(aggregate_c.size()) + " beliefs",
                  base + ".beliefs");
    }
    double sum = 0.0;
    for (double b : a.beliefs) {
      if (!(b >= 0.0)) {
        throw Error(ErrorCode::kValidationError, "negative belief", base + ".beliefs");
      }
      sum += b;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw Error(ErrorCode::kValidationError, "beliefs sum to " + std::to_string(sum),
                  base + ".beliefs");
    }
  }
}

std::vector<double> Allocation::state_prices() const {
  std::vector<double> out(phi.size());
  for (std::size_t w = 0; w < phi.size(); ++w) out[w] = phi[w] / phi0;
  return out;
}

double expected_utility(const UtilitySpec& utility, std::span<const double> beliefs,
                        const ConsumptionPlan& plan) {
  if (beliefs.size() != plan.c.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "beliefs and plan differ in length");
  }
  double acc = 0.0;
  for (std::size_t w = 0; w < beliefs.size(); ++w) {
    if (beliefs[w] == 0.0) continue;
    acc += beliefs[w] * utility.utility(plan.c0, plan.c[w]);
  }
  // v(c0) is evaluated even when every belief is zero, for the domain check.
  utility.value(plan.c0);
  return acc;
}

double expected_utility_trace(const UtilitySpec& utility, std::span<const double> beliefs,
                              const ConsumptionPlan& plan) {
  if (beliefs.size() != plan.c.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "beliefs and plan differ in length");
  }
  const auto n = static_cast<Eigen::Index>(beliefs.size());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index w = 0; w < n; ++w) {
    rho(w, w) = beliefs[w];
    u(w, w) = beliefs[w] == 0.0 ? 0.0 : utility.utility(plan.c0, plan.c[w]);
  }
  utility.value(plan.c0);
  return (rho * u).trace();
}

namespace {

struct MarketClearing {
  double phi = 0.0;
  std::vector<double> consumption;
  std::size_t iterations = 0;
};

// Finds phi with sum_i (scale_i / phi)^(1/gamma_i) = total, i.e. the multiplier
// at which marginal-utility inversion exhausts the aggregate. Safeguarded
// Newton in log(phi).
MarketClearing clear_market(std::span<const double> scale, std::span<const double> gamma,
                            double total, const ParetoConfig& config) {
  const std::size_t n = scale.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (scale[i] <= 0.0) continue;
    ++active;
    const double ls = std::log(scale[i]);
    // Alone, agent i would demand the whole aggregate at this multiplier.
    lo = std::min(lo, ls - gamma[i] * std::log(total));
    hi = std::max(hi, ls - gamma[i] * std::log(total / static_cast<double>(n)));
  }
  MarketClearing out;
  out.consumption.assign(n, 0.0);
  if (active == 0) return out;

  auto demand = [&](double x, double& slope) {
    double sum = 0.0;
    slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (scale[i] <= 0.0) continue;
      const double c = std::exp((std::log(scale[i]) - x) / gamma[i]);
      sum += c;
      slope -= c / gamma[i];
    }
    return sum;
  };

  double x = 0.5 * (lo + hi);
  bool converged = false;
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    out.iterations = it + 1;
    double slope = 0.0;
    const double g = demand(x, slope) - total;
    if (std::abs(g) <= config.tol * total) {
      converged = true;
      break;
    }
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) {
      x = next;
      converged = true;
      break;
    }
    x = next;
  }
  if (!converged) {
    double slope = 0.0;
    const double g = demand(x, slope) - total;
    throw Error(ErrorCode::kNoInteriorSolution,
                "multiplier iteration stalled, best residual " + std::to_string(std::abs(g)));
  }

  out.phi = std::exp(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (scale[i] <= 0.0) continue;
    out.consumption[i] = std::max(config.floor, std::exp((std::log(scale[i]) - x) / gamma[i]));
    sum += out.consumption[i];
  }
  // Absorb the last rounding so aggregates clear exactly.
  const double fix = total / sum;
  for (double& c : out.consumption) c *= fix;
  return out;
}

}  // namespace

Allocation solve_pareto(const EconomySpec& economy, const ParetoConfig& config) {
  economy.validate();
  const std::size_t agents = economy.agents.size();
  const std::size_t states = economy.state_count();

  Allocation alloc;
  alloc.plans.assign(agents, ConsumptionPlan{0.0, std::vector<double>(states, 0.0)});
  alloc.phi.assign(states, 0.0);

  std::vector<double> gamma(agents), scale(agents);
  for (std::size_t i = 0; i < agents; ++i) gamma[i] = economy.agents[i].utility.gamma;

  // Time 0: lambda_i * (sum_w bel_i(w)) * v'(c_i0) = phi_0.
  for (std::size_t i = 0; i < agents; ++i) {
    const auto& a = economy.agents[i];
    double mass = 0.0;
    for (double b : a.beliefs) mass += b;
    scale[i] = a.weight * mass;
  }
  auto present = clear_market(scale, gamma, economy.aggregate_c0, config);
  alloc.phi0 = present.phi;
  alloc.iterations = present.iterations;
  for (std::size_t i = 0; i < agents; ++i) alloc.plans[i].c0 = present.consumption[i];

  // State w: lambda_i * bel_i(w) * beta_i * v'(c_iw) = phi_w.
  for (std::size_t w = 0; w < states; ++w) {
    bool any = false;
    for (std::size_t i = 0; i < agents; ++i) {
      const auto& a = economy.agents[i];
      scale[i] = a.weight * a.beliefs[w] * a.utility.beta;
      any = any || scale[i] > 0.0;
    }
    if (!any) {
      alloc.degenerate_states.push_back(w);
      for (auto& plan : alloc.plans) plan.c[w] = economy.aggregate_c[w] / agents;
      continue;
    }
    auto clearing = clear_market(scale, gamma, economy.aggregate_c[w], config);
    alloc.phi[w] = clearing.phi;
    alloc.iterations = std::max(alloc.iterations, clearing.iterations);
    for (std::size_t i = 0; i < agents; ++i) alloc.plans[i].c[w] = clearing.consumption[i];
  }
  return alloc;
}

double welfare(const EconomySpec& economy, const Allocation& allocation) {
  double acc = 0.0;
  for (std::size_t i = 0; i < economy.agents.size(); ++i) {
    const auto& a = economy.agents[i];
    acc += a.weight * expected_utility(a.utility, a.beliefs, allocation.plans[i]);
  }
  return acc;
}

double FocReport::max() const { return std::max({present, contingent, feasibility}); }

FocReport foc_residuals(const EconomySpec& economy, const Allocation& allocation) {
  FocReport r;
  double total0 = 0.0;
  std::vector<double> total(economy.state_count(), 0.0);
  for (std::size_t i = 0; i < economy.agents.size(); ++i) {
    const auto& a = economy.agents[i];
    const auto& plan = allocation.plans[i];
    double mass = 0.0;
    for (double b : a.beliefs) mass += b;
    const double lhs0 = a.weight * mass * a.utility.d_present(plan.c0);
    r.present = std::max(r.present, std::abs(lhs0 - allocation.phi0) / allocation.phi0);
    for (std::size_t w = 0; w < economy.state_count(); ++w) {
      total[w] += plan.c[w];
      if (a.beliefs[w] == 0.0 || allocation.phi[w] == 0.0) continue;
      const double lhs = a.weight * a.beliefs[w] * a.utility.d_future(plan.c[w]);
      r.contingent = std::max(r.contingent, std::abs(lhs - allocation.phi[w]) / allocation.phi[w]);
    }
    total0 += plan.c0;
  }
  r.feasibility = std::abs(total0 - economy.aggregate_c0);
  for (std::size_t w = 0; w < economy.state_count(); ++w) {
    r.feasibility = std::max(r.feasibility, std::abs(total[w] - economy.aggregate_c[w]));
  }
  return r;
}

namespace {

double mrs(const EconomyAgent& a, const ConsumptionPlan& plan, std::size_t w) {
  double denom = 0.0;
  for (double b : a.beliefs) denom += b * a.utility.d_present(plan.c0);
  return a.beliefs[w] * a.utility.d_future(plan.c[w]) / denom;
}

}  // namespace

MrsReport check_mrs_equality(const EconomySpec& economy, const Allocation& allocation,
                             double tol) {
  const auto prices = allocation.state_prices();
  MrsReport r;
  for (std::size_t i = 0; i < economy.agents.size(); ++i) {
    const auto& a = economy.agents[i];
    std::vector<double> row(economy.state_count());
    for (std::size_t w = 0; w < economy.state_count(); ++w) {
      row[w] = mrs(a, allocation.plans[i], w);
      r.max_deviation = std::max(r.max_deviation, std::abs(row[w] - prices[w]));
    }
    r.mrs.push_back(std::move(row));
  }
  r.pass = r.max_deviation <= tol;
  return r;
}

QuantumPriceReport check_quantum_price_conditions(const EconomySpec& economy,
                                                  const Allocation& allocation,
                                                  const JointKet& ket, double discount,
                                                  double tol) {
  const auto bel = rational_beliefs(ket, discount);
  if (bel.size() != economy.state_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "ket and economy differ in state count");
  }
  for (std::size_t i = 0; i < economy.agents.size(); ++i) {
    for (std::size_t w = 0; w < bel.size(); ++w) {
      if (std::abs(economy.agents[i].beliefs[w] - bel[w]) > tol) {
        throw Error(ErrorCode::kBeliefMismatch,
                    "agent " + std::to_string(i) + " does not hold rational beliefs");
      }
    }
  }

  QuantumPriceReport r;
  for (std::size_t w = 0; w < bel.size(); ++w) {
    if (bel[w] == 0.0) r.excluded_states.push_back(w);
  }
  for (std::size_t i = 0; i < economy.agents.size(); ++i) {
    const auto& a = economy.agents[i];
    const auto& plan = allocation.plans[i];
    // D * sum_w (|psi_w|^2 / D) * du/dc0
    double rhs = 0.0;
    for (std::size_t w = 0; w < bel.size(); ++w) rhs += discount * bel[w] * a.utility.d_present(plan.c0);

    std::vector<double> price_row(bel.size(), 0.0), marginal_row(bel.size(), 0.0);
    for (std::size_t w = 0; w < bel.size(); ++w) {
      if (bel[w] == 0.0) continue;
      const double quantum_price = discount * bel[w];  // |psi(f_w, w)|^2
      price_row[w] = std::abs(mrs(a, plan, w) - quantum_price);
      marginal_row[w] = std::abs(a.utility.d_future(plan.c[w]) - rhs);
      r.price_residual = std::max(r.price_residual, price_row[w]);
      r.marginal_residual = std::max(r.marginal_residual, marginal_row[w]);
    }
    r.price_residuals.push_back(std::move(price_row));
    r.marginal_residuals.push_back(std::move(marginal_row));
  }
  r.pass = r.price_residual <= tol && r.marginal_residual <= tol;
  return r;
}

}  // namespace qnash
