#include "qnash/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <random>
#include <set>

#include "qnash/error.hpp"
#include "qnash/kernels.hpp"

namespace qnash {

MixedProfile MixedProfile::uniform(const GameSpec& spec) {
  MixedProfile p;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    p.weights.emplace_back(spec.dim(i), 1.0 / static_cast<double>(spec.dim(i)));
  }
  return p;
}

MixedProfile MixedProfile::vertex(const GameSpec& spec, std::span<const std::size_t> strategies) {
  if (strategies.size() != spec.player_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "vertex needs one strategy per player");
  }
  MixedProfile p;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    std::vector<double> w(spec.dim(i), 0.0);
    w.at(strategies[i]) = 1.0;
    p.weights.push_back(std::move(w));
  }
  return p;
}

MixedProfile MixedProfile::from_pricing_matrices(const PricingMatrixTuple& matrices) {
  MixedProfile p;
  for (const auto& m : matrices) p.weights.push_back(m.weights);
  return p;
}

double linf_distance(const MixedProfile& a, const MixedProfile& b) {
  if (a.weights.size() != b.weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "profiles have different player counts");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (a.weights[i].size() != b.weights[i].size()) {
      throw Error(ErrorCode::kDimensionMismatch, "profiles have different strategy counts");
    }
    for (std::size_t f = 0; f < a.weights[i].size(); ++f) {
      d = std::max(d, std::abs(a.weights[i][f] - b.weights[i][f]));
    }
  }
  return d;
}

void validate_profile(const GameSpec& spec, const MixedProfile& profile, double tol) {
  if (profile.weights.size() != spec.player_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "profile has " +
                                                   std::to_string(profile.weights.size()) +
                                                   " players, game has " +
                                                   std::to_string(spec.player_count()));
  }
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const auto& w = profile.weights[i];
    if (w.size() != spec.dim(i)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "player " + std::to_string(i) + " weight vector has wrong length");
    }
    double sum = 0.0;
    for (double v : w) {
      if (!(v >= -tol)) {
        throw Error(ErrorCode::kValidationError, "negative weight",
                    "profile[" + std::to_string(i) + "]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw Error(ErrorCode::kValidationError, "weights sum to " + std::to_string(sum),
                  "profile[" + std::to_string(i) + "]");
    }
  }
}

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::kIterative ? "ITERATIVE" : "SUPPORT_ENUM";
}

namespace {

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

// prod_j p_j(s_j(a)) over all paths, with players `skip_a` and `skip_b`
// contributing a factor of one.
std::vector<double> product_weights(const GameSpec& spec, const MixedProfile& profile,
                                    std::size_t skip_a = kNoSkip,
                                    std::size_t skip_b = kNoSkip) {
  std::vector<double> w{1.0};
  w.reserve(spec.path_count());
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const std::size_t len = w.size();
    const std::size_t d = spec.dim(i);
    w.resize(len * d);
    const bool skip = i == skip_a || i == skip_b;
    // Fill high blocks first so the low block is still intact when read.
    for (std::size_t s = d; s-- > 0;) {
      const double f = skip ? 1.0 : profile.weights[i][s];
      for (std::size_t k = 0; k < len; ++k) w[s * len + k] = f * w[k];
    }
  }
  return w;
}

}  // namespace

double profile_payoff(const GameSpec& spec, const MixedProfile& profile, std::size_t player) {
  validate_profile(spec, profile);
  if (player >= spec.player_count()) {
    throw Error(ErrorCode::kIndexOutOfRange, "player " + std::to_string(player));
  }
  const auto w = product_weights(spec, profile);
  return spec.discount() * kernels::dot(spec.payoffs(player), w);
}

namespace {

std::vector<double> deviation_payoffs_unchecked(const GameSpec& spec,
                                                const MixedProfile& profile,
                                                std::size_t player) {
  const auto w = product_weights(spec, profile, player);
  const auto pay = spec.payoffs(player);
  std::vector<double> out(spec.dim(player), 0.0);
  for (std::size_t a = 0; a < spec.path_count(); ++a) {
    out[spec.strategy_of(a, player)] += pay[a] * w[a];
  }
  for (double& v : out) v *= spec.discount();
  return out;
}

double mixed_value(std::span<const double> weights, std::span<const double> deviation) {
  return kernels::dot(weights, deviation);
}

// gains[i][f] = max(0, pv_i(|Q:f>) - pv_i(|Q>)).
std::vector<std::vector<double>> nash_gains(const GameSpec& spec, const MixedProfile& profile) {
  std::vector<std::vector<double>> gains(spec.player_count());
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const auto dev = deviation_payoffs_unchecked(spec, profile, i);
    const double value = mixed_value(profile.weights[i], dev);
    gains[i].resize(dev.size());
    for (std::size_t f = 0; f < dev.size(); ++f) gains[i][f] = std::max(0.0, dev[f] - value);
  }
  return gains;
}

MixedProfile apply_nash_map(const MixedProfile& profile,
                            const std::vector<std::vector<double>>& gains) {
  MixedProfile out = profile;
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    double total = 0.0;
    for (double g : gains[i]) total += g;
    if (total == 0.0) continue;
    for (std::size_t f = 0; f < out.weights[i].size(); ++f) {
      out.weights[i][f] = (profile.weights[i][f] + gains[i][f]) / (1.0 + total);
    }
  }
  return out;
}

double max_gain(const std::vector<std::vector<double>>& gains) {
  double m = 0.0;
  for (const auto& g : gains) {
    for (double v : g) m = std::max(m, v);
  }
  return m;
}

}  // namespace

std::vector<double> deviation_payoffs(const GameSpec& spec, const MixedProfile& profile,
                                      std::size_t player) {
  validate_profile(spec, profile);
  if (player >= spec.player_count()) {
    throw Error(ErrorCode::kIndexOutOfRange, "player " + std::to_string(player));
  }
  return deviation_payoffs_unchecked(spec, profile, player);
}

MixedProfile nash_map_step(const GameSpec& spec, const MixedProfile& profile) {
  validate_profile(spec, profile);
  return apply_nash_map(profile, nash_gains(spec, profile));
}

VerifyReport verify_equilibrium(const GameSpec& spec, const MixedProfile& profile, double eps) {
  validate_profile(spec, profile);
  VerifyReport report;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const auto dev = deviation_payoffs_unchecked(spec, profile, i);
    const double value = mixed_value(profile.weights[i], dev);
    const double best = *std::max_element(dev.begin(), dev.end());
    const double gain = std::max(0.0, best - value);
    report.gains.push_back(gain);
    if (i == 0 || gain > report.worst_gain) {
      report.worst_gain = gain;
      report.worst_player = i;
    }
  }
  report.ok = report.worst_gain <= eps;
  return report;
}

PriceKet profile_to_ket(const GameSpec& spec, const MixedProfile& profile) {
  validate_profile(spec, profile);
  MixedProfile roots = profile;
  for (auto& w : roots.weights) {
    for (double& v : w) v = std::sqrt(std::max(0.0, v));
  }
  const auto amps = product_weights(spec, roots);
  std::vector<cplx> q(amps.begin(), amps.end());
  return PriceKet::future_value(std::move(q));
}

namespace {

// Projects each weight vector onto the simplex by clamping and rescaling.
void clean_profile(MixedProfile& p) {
  for (auto& w : p.weights) {
    double sum = 0.0;
    for (double& v : w) {
      v = std::max(0.0, v);
      sum += v;
    }
    if (sum > 0.0) {
      for (double& v : w) v /= sum;
    }
  }
}

// Newton's method on the indifference system of a fixed support:
//   pv_i(f) - v_i = 0 for f in S_i,  sum_{f in S_i} p_i(f) = 1.
// Returns false when Newton does not reach a nonnegative solution.
bool solve_on_support(const GameSpec& spec, const std::vector<std::vector<std::size_t>>& support,
                      MixedProfile& profile) {
  const std::size_t n = spec.player_count();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + support[i].size() + 1;
  const auto size = static_cast<Eigen::Index>(offset[n]);

  MixedProfile p = profile;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(spec.dim(i), 0.0);
    double sum = 0.0;
    for (std::size_t f : support[i]) sum += std::max(profile.weights[i][f], 1e-3);
    for (std::size_t f : support[i]) w[f] = std::max(profile.weights[i][f], 1e-3) / sum;
    p.weights[i] = std::move(w);
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dev = deviation_payoffs_unchecked(spec, p, i);
    values[i] = mixed_value(p.weights[i], dev);
  }

  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd residual(size);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t i = 0; i < n; ++i) {
      const auto dev = deviation_payoffs_unchecked(spec, p, i);
      const auto row0 = static_cast<Eigen::Index>(offset[i]);
      const auto k = static_cast<Eigen::Index>(support[i].size());
      for (Eigen::Index r = 0; r < k; ++r) {
        residual(row0 + r) = dev[support[i][r]] - values[i];
        jac(row0 + r, row0 + k) = -1.0;
      }
      double sum = -1.0;
      for (std::size_t f : support[i]) sum += p.weights[i][f];
      residual(row0 + k) = sum;
      for (Eigen::Index c = 0; c < k; ++c) jac(row0 + k, row0 + c) = 1.0;

      // d pv_i(f) / d p_j(g) for j != i: payoff with i at f and j at g.
      const auto pay = spec.payoffs(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto w = product_weights(spec, p, i, j);
        std::vector<double> block(spec.dim(i) * spec.dim(j), 0.0);
        for (std::size_t a = 0; a < spec.path_count(); ++a) {
          block[spec.strategy_of(a, i) * spec.dim(j) + spec.strategy_of(a, j)] += pay[a] * w[a];
        }
        const auto col0 = static_cast<Eigen::Index>(offset[j]);
        for (Eigen::Index r = 0; r < k; ++r) {
          for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(support[j].size()); ++c) {
            jac(row0 + r, col0 + c) =
                spec.discount() * block[support[i][r] * spec.dim(j) + support[j][c]];
          }
        }
      }
    }
    if (residual.cwiseAbs().maxCoeff() < 1e-14) break;
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-residual);
    if (!step.allFinite()) return false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row0 = static_cast<Eigen::Index>(offset[i]);
      for (std::size_t r = 0; r < support[i].size(); ++r) {
        p.weights[i][support[i][r]] += step(row0 + static_cast<Eigen::Index>(r));
      }
      values[i] += step(row0 + static_cast<Eigen::Index>(support[i].size()));
    }
  }
  for (const auto& w : p.weights) {
    for (double v : w) {
      if (!std::isfinite(v) || v < -1e-9) return false;
    }
  }
  clean_profile(p);
  profile = std::move(p);
  return true;
}

std::vector<std::vector<std::size_t>> support_of(const MixedProfile& p, double threshold) {
  std::vector<std::vector<std::size_t>> s(p.weights.size());
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    const double top = *std::max_element(p.weights[i].begin(), p.weights[i].end());
    for (std::size_t f = 0; f < p.weights[i].size(); ++f) {
      if (p.weights[i][f] > threshold * top) s[i].push_back(f);
    }
  }
  return s;
}

// Strategies whose deviation payoff is within `slack` of the best response.
std::vector<std::vector<std::size_t>> best_response_support(const GameSpec& spec,
                                                            const MixedProfile& p, double slack) {
  std::vector<std::vector<std::size_t>> s(p.weights.size());
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    const auto dev = deviation_payoffs_unchecked(spec, p, i);
    const double top = *std::max_element(dev.begin(), dev.end());
    for (std::size_t f = 0; f < dev.size(); ++f) {
      if (dev[f] >= top - slack) s[i].push_back(f);
    }
  }
  return s;
}

MixedProfile random_profile(const GameSpec& spec, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  MixedProfile p;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    std::vector<double> w(spec.dim(i));
    double sum = 0.0;
    for (double& v : w) sum += (v = expo(rng));
    for (double& v : w) v /= sum;
    p.weights.push_back(std::move(w));
  }
  return p;
}

struct RestartResult {
  MixedProfile profile;
  double epsilon = 0.0;
  std::size_t iterations = 0;
  bool certified = false;
  bool polished = false;
};

RestartResult run_restart(const GameSpec& spec, const IterativeConfig& config,
                          std::size_t restart) {
  std::mt19937_64 rng(config.seed + 0x9E3779B97F4A7C15ULL * (restart + 1));
  MixedProfile p = restart == 0 ? MixedProfile::uniform(spec) : random_profile(spec, rng);
  const double lambda = std::clamp(config.damping, 1e-6, 1.0);
  const std::size_t burn_in = config.max_iter / 2;

  MixedProfile average = p;
  for (auto& w : average.weights) std::fill(w.begin(), w.end(), 0.0);
  std::size_t averaged = 0;

  RestartResult out;
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    const auto gains = nash_gains(spec, p);
    const double eps = max_gain(gains);
    if (eps <= config.tol) {
      out = {p, eps, it, true, false};
      return out;
    }
    const MixedProfile mapped = apply_nash_map(p, gains);
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      for (std::size_t f = 0; f < p.weights[i].size(); ++f) {
        p.weights[i][f] = (1.0 - lambda) * p.weights[i][f] + lambda * mapped.weights[i][f];
      }
    }
    if (it >= burn_in) {
      ++averaged;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        for (std::size_t f = 0; f < p.weights[i].size(); ++f) {
          average.weights[i][f] += (p.weights[i][f] - average.weights[i][f]) / averaged;
        }
      }
    }
  }

  out.profile = p;
  out.epsilon = verify_equilibrium(spec, p, config.tol).worst_gain;
  out.iterations = config.max_iter;
  if (out.epsilon <= config.tol) {
    out.certified = true;
    return out;
  }

  // The Nash map can orbit an interior equilibrium indefinitely; finish with
  // Newton on the indifference system of the support the orbit suggests.
  std::vector<MixedProfile> seeds{p};
  if (averaged > 0) seeds.push_back(average);
  std::set<std::vector<std::vector<std::size_t>>> tried;
  double scale = 0.0;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    for (double v : spec.payoffs(i)) scale = std::max(scale, std::abs(v));
  }
  scale *= spec.discount();
  for (const auto& seed : seeds) {
    std::vector<std::vector<std::vector<std::size_t>>> supports;
    for (double threshold : {1e-2, 1e-4, 1e-7}) supports.push_back(support_of(seed, threshold));
    // Slow orbits near a pure equilibrium leave visible weight on losing
    // strategies, so also try near-best-response sets.
    for (double slack : {0.0, 1e-6, 1e-3}) {
      supports.push_back(best_response_support(spec, seed, slack * scale));
    }
    // A failed candidate hands its own best-response set to the queue.
    for (std::size_t k = 0; k < supports.size() && tried.size() < 32; ++k) {
      const auto support = supports[k];
      if (!tried.insert(support).second) continue;
      MixedProfile candidate = seed;
      if (!solve_on_support(spec, support, candidate)) continue;
      supports.push_back(best_response_support(spec, candidate, 0.0));
      const double eps = verify_equilibrium(spec, candidate, config.tol).worst_gain;
      if (eps < out.epsilon) {
        out.profile = candidate;
        out.epsilon = eps;
        out.polished = true;
        out.certified = eps <= config.tol;
      }
      if (out.certified) return out;
    }
  }
  return out;
}

EquilibriumResult make_result(const GameSpec& spec, MixedProfile profile, double epsilon,
                              SolveMethod method, std::size_t iterations, bool certified,
                              bool polished) {
  EquilibriumResult r;
  r.ket = profile_to_ket(spec, profile);
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    r.pv.push_back(present_value(r.ket, PayoffOperator::for_player(spec, i), spec.discount()));
  }
  r.profile = std::move(profile);
  r.epsilon = epsilon;
  r.method = method;
  r.iterations = iterations;
  r.certified = certified;
  r.polished = polished;
  return r;
}

bool profile_less(const MixedProfile& a, const MixedProfile& b) {
  return a.weights < b.weights;
}

}  // namespace

IterativeOutcome solve_iterative(const GameSpec& spec, const IterativeConfig& config) {
  const std::size_t restarts = std::max<std::size_t>(1, config.restarts);
  std::vector<RestartResult> runs(restarts);
  if (config.threads > 1) {
    std::vector<std::future<RestartResult>> jobs;
    for (std::size_t r = 0; r < restarts; ++r) {
      jobs.push_back(std::async(std::launch::async, run_restart, std::cref(spec),
                                std::cref(config), r));
    }
    for (std::size_t r = 0; r < restarts; ++r) runs[r] = jobs[r].get();
  } else {
    for (std::size_t r = 0; r < restarts; ++r) runs[r] = run_restart(spec, config, r);
  }

  std::stable_sort(runs.begin(), runs.end(), [](const RestartResult& a, const RestartResult& b) {
    if (a.certified != b.certified) return a.certified;
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    return profile_less(a.profile, b.profile);
  });

  IterativeOutcome outcome;
  for (const auto& run : runs) {
    if (!run.certified) continue;
    const bool seen = std::any_of(outcome.distinct.begin(), outcome.distinct.end(),
                                  [&](const EquilibriumResult& e) {
                                    return linf_distance(e.profile, run.profile) <= 1e-4;
                                  });
    if (seen) continue;
    outcome.distinct.push_back(make_result(spec, run.profile, run.epsilon,
                                           SolveMethod::kIterative, run.iterations, true,
                                           run.polished));
  }
  const auto& best = runs.front();
  outcome.result = make_result(spec, best.profile, best.epsilon, SolveMethod::kIterative,
                               best.iterations, best.certified, best.polished);
  return outcome;
}

namespace {

void combinations(std::size_t n, std::size_t k, std::vector<std::size_t>& current,
                  std::size_t start, std::vector<std::vector<std::size_t>>& out) {
  if (current.size() == k) {
    out.push_back(current);
    return;
  }
  for (std::size_t v = start; v < n; ++v) {
    current.push_back(v);
    combinations(n, k, current, v + 1, out);
    current.pop_back();
  }
}

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  combinations(n, k, current, 0, out);
  return out;
}

// Mix over `cols` that makes the row player indifferent across `rows`:
//   [M(rows, cols) -1; 1' 0] [x; v] = [0; 1].
bool indifference_mix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols, Eigen::VectorXd& mix,
                      double& value) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) sys(r, c) = m(rows[r], cols[c]);
    sys(r, k) = -1.0;
  }
  for (Eigen::Index c = 0; c < k; ++c) sys(k, c) = 1.0;
  rhs(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd x = lu.solve(rhs);
  mix = x.head(k);
  value = x(k);
  return true;
}

}  // namespace

SupportEnumOutcome solve_support_enum(const GameSpec& spec) {
  if (spec.player_count() != 2) {
    throw Error(ErrorCode::kNotBimatrix, "support enumeration needs exactly 2 players, got " +
                                             std::to_string(spec.player_count()));
  }
  const std::size_t d0 = spec.dim(0);
  const std::size_t d1 = spec.dim(1);
  // a(r, c): row player's payoff; b(r, c): column player's payoff.
  Eigen::MatrixXd a(d0, d1), b(d0, d1);
  for (std::size_t r = 0; r < d0; ++r) {
    for (std::size_t c = 0; c < d1; ++c) {
      const std::size_t idx = r * spec.stride(0) + c * spec.stride(1);
      a(r, c) = spec.payoffs(0)[idx];
      b(r, c) = spec.payoffs(1)[idx];
    }
  }
  const Eigen::MatrixXd bt = b.transpose();
  constexpr double kTol = 1e-10;

  struct Found {
    std::vector<std::size_t> rows, cols;
    MixedProfile profile;
  };
  std::vector<Found> found;
  SupportEnumOutcome outcome;

  for (std::size_t k = 1; k <= std::min(d0, d1); ++k) {
    const auto row_sets = subsets_of_size(d0, k);
    const auto col_sets = subsets_of_size(d1, k);
    for (const auto& rows : row_sets) {
      for (const auto& cols : col_sets) {
        Eigen::VectorXd q, p;
        double v = 0.0, w = 0.0;
        if (!indifference_mix(a, rows, cols, q, v) || !indifference_mix(bt, cols, rows, p, w)) {
          outcome.skipped.push_back({rows, cols});
          continue;
        }
        if (q.minCoeff() < -kTol || p.minCoeff() < -kTol) continue;

        MixedProfile prof;
        prof.weights = {std::vector<double>(d0, 0.0), std::vector<double>(d1, 0.0)};
        for (std::size_t r = 0; r < k; ++r) prof.weights[0][rows[r]] = std::max(0.0, p(r));
        for (std::size_t c = 0; c < k; ++c) prof.weights[1][cols[c]] = std::max(0.0, q(c));
        clean_profile(prof);

        const Eigen::Map<const Eigen::VectorXd> pv(prof.weights[0].data(), d0);
        const Eigen::Map<const Eigen::VectorXd> qv(prof.weights[1].data(), d1);
        const Eigen::VectorXd row_pay = a * qv;
        const Eigen::VectorXd col_pay = bt * pv;
        if (row_pay.maxCoeff() > v + kTol || col_pay.maxCoeff() > w + kTol) continue;

        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Found& f) {
          return linf_distance(f.profile, prof) <= 1e-9;
        });
        if (!duplicate) found.push_back({rows, cols, std::move(prof)});
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const Found& x, const Found& y) {
    if (x.rows != y.rows) return x.rows < y.rows;
    return x.cols < y.cols;
  });
  for (auto& f : found) {
    const double eps = verify_equilibrium(spec, f.profile, 0.0).worst_gain;
    outcome.equilibria.push_back(make_result(spec, std::move(f.profile), eps,
                                             SolveMethod::kSupportEnum, 0, eps <= 1e-9, false));
    outcome.row_supports.push_back(std::move(f.rows));
    outcome.col_supports.push_back(std::move(f.cols));
  }
  return outcome;
}

PriceKet sequential_best_response_ket(const GameSpec& spec, std::size_t leader,
                                      const std::vector<cplx>& weights) {
  if (spec.player_count() != 2) {
    throw Error(ErrorCode::kNotBimatrix, "sequential play needs exactly 2 players");
  }
  if (leader > 1) throw Error(ErrorCode::kIndexOutOfRange, "leader must be 0 or 1");
  if (weights.size() != spec.dim(leader)) {
    throw Error(ErrorCode::kDimensionMismatch, "one amplitude per leader strategy required");
  }
  const double norm = kernels::norm_squared(weights);
  if (std::abs(norm - 1.0) > Tolerances{}.construction) {
    throw Error(ErrorCode::kNormMismatch, "leader amplitudes must be unit norm");
  }
  const std::size_t follower = 1 - leader;
  const auto follower_pay = spec.payoffs(follower);

  std::vector<cplx> amps(spec.path_count(), cplx{});
  std::array<std::size_t, 2> tuple{};
  for (std::size_t s = 0; s < spec.dim(leader); ++s) {
    tuple[leader] = s;
    std::size_t best = 0;
    double best_pay = 0.0;
    for (std::size_t t = 0; t < spec.dim(follower); ++t) {
      tuple[follower] = t;
      const double pay = follower_pay[spec.flat_index(tuple)];
      if (t == 0 || pay > best_pay) {
        best = t;
        best_pay = pay;
      }
    }
    tuple[follower] = best;
    amps[spec.flat_index(tuple)] = weights[s];
  }
  return PriceKet::future_value(std::move(amps));
}

}  // namespace qnash
