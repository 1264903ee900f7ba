#pragma once

// Two-period pure exchange economy over lottery-state-contingent consumption.

#include <cstddef>
#include <span>
#include <vector>

#include "qnash/lottery.hpp"

namespace qnash {

// Time-separable CRRA: u(c0, cw) = v(c0) + beta * v(cw) with
// v(c) = (c^(1-gamma) - 1) / (1 - gamma), or ln c when gamma == 1.
struct UtilitySpec {
  double gamma = 1.0;
  double beta = 1.0;

  void validate() const;

  double value(double c) const;             // v(c)
  double marginal(double c) const;          // v'(c) = c^-gamma
  double second_derivative(double c) const; // v''(c)
  double inverse_marginal(double m) const;  // c with v'(c) = m

  double utility(double c0, double cw) const { return value(c0) + beta * value(cw); }
  double d_present(double c0) const { return marginal(c0); }
  double d_future(double cw) const { return beta * marginal(cw); }
};

struct EconomyAgent {
  UtilitySpec utility;
  double weight = 1.0;         // Pareto weight lambda_i
  std::vector<double> beliefs; // bel_i over lottery states
};

struct EconomySpec {
  std::vector<EconomyAgent> agents;
  double aggregate_c0 = 1.0;
  std::vector<double> aggregate_c;  // one per lottery state

  std::size_t state_count() const { return aggregate_c.size(); }
  // Throws kValidationError with a field path.
  void validate(double tol = Tolerances{}.construction) const;
};

struct ConsumptionPlan {
  double c0 = 0.0;
  std::vector<double> c;
};

struct Allocation {
  std::vector<ConsumptionPlan> plans;
  // Lagrange multipliers at the given weights; state_prices() divides by phi0.
  double phi0 = 0.0;
  std::vector<double> phi;
  // States nobody assigns positive belief to; split equally, phi = 0.
  std::vector<std::size_t> degenerate_states;
  std::size_t iterations = 0;

  std::vector<double> state_prices() const;
};

// sum_w bel(w) u(c0, c_w). Throws kDomainError for consumption outside the
// domain of v.
double expected_utility(const UtilitySpec& utility, std::span<const double> beliefs,
                        const ConsumptionPlan& plan);
// Same quantity as Tr(rho_bel * u_hat) with both operators built explicitly.
double expected_utility_trace(const UtilitySpec& utility, std::span<const double> beliefs,
                              const ConsumptionPlan& plan);

struct ParetoConfig {
  std::size_t max_iter = 200;
  double tol = 1e-13;  // relative feasibility target per state
  double floor = 1e-12;
};

// Weighted-welfare optimum. Throws kNoInteriorSolution if a state's
// multiplier equation does not converge.
Allocation solve_pareto(const EconomySpec& economy, const ParetoConfig& config = {});

double welfare(const EconomySpec& economy, const Allocation& allocation);

struct FocReport {
  double present = 0.0;      // max relative residual of the time-0 condition
  double contingent = 0.0;   // max relative residual of the state conditions
  double feasibility = 0.0;  // max absolute aggregate mismatch
  double max() const;
};

FocReport foc_residuals(const EconomySpec& economy, const Allocation& allocation);

struct MrsReport {
  bool pass = false;
  double max_deviation = 0.0;
  std::vector<std::vector<double>> mrs;  // [agent][state]
};

// Marginal rate of substitution per agent and state against phi_w / phi_0.
MrsReport check_mrs_equality(const EconomySpec& economy, const Allocation& allocation,
                             double tol);

struct QuantumPriceReport {
  bool pass = false;
  double price_residual = 0.0;     // MRS vs |psi|^2
  double marginal_residual = 0.0;  // u'_w vs D sum (|psi|^2 / D) u'_0
  std::vector<std::size_t> excluded_states;  // zero quantum price
  std::vector<std::vector<double>> price_residuals;     // [agent][state]
  std::vector<std::vector<double>> marginal_residuals;  // [agent][state]
};

// Requires every agent to hold the rational beliefs implied by `ket`; throws
// kBeliefMismatch otherwise.
QuantumPriceReport check_quantum_price_conditions(const EconomySpec& economy,
                                                  const Allocation& allocation,
                                                  const JointKet& ket, double discount,
                                                  double tol);

}  // namespace qnash
