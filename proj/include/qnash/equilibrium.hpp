#pragma once

// Quantum Nash equilibria restricted to product kets, i.e. one mixed strategy
// (diagonal pricing matrix) per player.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "qnash/game.hpp"

namespace qnash {

// weights[i][f] is player i's capitalized price for pure strategy f.
struct MixedProfile {
  std::vector<std::vector<double>> weights;

  std::size_t player_count() const { return weights.size(); }
  static MixedProfile uniform(const GameSpec& spec);
  static MixedProfile vertex(const GameSpec& spec, std::span<const std::size_t> strategies);
  static MixedProfile from_pricing_matrices(const PricingMatrixTuple& matrices);
};

double linf_distance(const MixedProfile& a, const MixedProfile& b);

// Throws kDimensionMismatch on shape errors and kValidationError when a weight
// vector leaves the simplex by more than tol.
void validate_profile(const GameSpec& spec, const MixedProfile& profile,
                      double tol = Tolerances{}.construction);

enum class SolveMethod { kIterative, kSupportEnum };
std::string_view to_string(SolveMethod method);

struct EquilibriumResult {
  MixedProfile profile;
  PriceKet ket;
  std::vector<double> pv;
  double epsilon = 0.0;
  SolveMethod method = SolveMethod::kIterative;
  std::size_t iterations = 0;
  bool certified = false;
  // Iterative only: the certificate came from the support-indifference polish
  // rather than from the Nash-map iterate itself.
  bool polished = false;
};

// D * sum_a payoff_i(a) * prod_j p_j(s_j(a)).
double profile_payoff(const GameSpec& spec, const MixedProfile& profile, std::size_t player);

// Present value for `player` at each of its pure strategies against the others'
// mixes, i.e. the payoff of |Q:f_i>.
std::vector<double> deviation_payoffs(const GameSpec& spec, const MixedProfile& profile,
                                      std::size_t player);

MixedProfile nash_map_step(const GameSpec& spec, const MixedProfile& profile);

struct VerifyReport {
  bool ok = false;
  std::size_t worst_player = 0;
  double worst_gain = 0.0;
  std::vector<double> gains;  // per player, clamped at zero
};

VerifyReport verify_equilibrium(const GameSpec& spec, const MixedProfile& profile, double eps);

PriceKet profile_to_ket(const GameSpec& spec, const MixedProfile& profile);

struct IterativeConfig {
  std::size_t max_iter = 5000;
  double damping = 0.5;
  std::size_t restarts = 20;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct IterativeOutcome {
  EquilibriumResult result;  // best certified, or best-epsilon uncertified
  // All certified profiles pairwise more than 1e-4 apart (l-inf), sorted by
  // (epsilon, profile).
  std::vector<EquilibriumResult> distinct;
};

IterativeOutcome solve_iterative(const GameSpec& spec, const IterativeConfig& config = {});

struct SkippedSupport {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

struct SupportEnumOutcome {
  std::vector<EquilibriumResult> equilibria;  // sorted by (row support, col support)
  std::vector<std::vector<std::size_t>> row_supports;
  std::vector<std::vector<std::size_t>> col_supports;
  std::vector<SkippedSupport> skipped;  // singular indifference systems
};

// Throws kNotBimatrix unless the game has exactly two players.
SupportEnumOutcome solve_support_enum(const GameSpec& spec);

// Leader commits; the follower best-responds to each leader strategy (ties to
// the lowest index). Returns sum_s w[s] |BR(s), s>.
PriceKet sequential_best_response_ket(const GameSpec& spec, std::size_t leader,
                                      const std::vector<cplx>& weights);

}  // namespace qnash
