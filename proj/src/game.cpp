#include "qnash/game.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "qnash/error.hpp"
#include "qnash/kernels.hpp"

namespace qnash {

GameSpec::GameSpec(std::vector<Player> players, std::vector<std::vector<double>> payoffs,
                   double discount)
    : players_(std::move(players)), payoffs_(std::move(payoffs)), discount_(discount) {
  if (players_.empty()) {
    throw Error(ErrorCode::kValidationError, "at least one player required", "players");
  }
  std::size_t n = 1;
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const auto d = players_[i].strategies.size();
    const std::string field = "players[" + std::to_string(i) + "].strategies";
    if (d == 0) throw Error(ErrorCode::kValidationError, "player has no strategies", field);
    if (n > kMaxPaths / d) {
      throw Error(ErrorCode::kValidationError,
                  "path count exceeds " + std::to_string(kMaxPaths), field);
    }
    strides_.push_back(n);
    dims_.push_back(d);
    n *= d;
  }
  path_count_ = n;

  if (payoffs_.size() != players_.size()) {
    throw Error(ErrorCode::kValidationError,
                "expected one payoff array per player (" + std::to_string(players_.size()) +
                    "), got " + std::to_string(payoffs_.size()),
                "payoffs");
  }
  for (std::size_t i = 0; i < payoffs_.size(); ++i) {
    const std::string field = "payoffs." + players_[i].name;
    if (payoffs_[i].size() != path_count_) {
      throw Error(ErrorCode::kValidationError,
                  "expected " + std::to_string(path_count_) + " entries, got " +
                      std::to_string(payoffs_[i].size()),
                  field);
    }
    for (std::size_t a = 0; a < path_count_; ++a) {
      if (!std::isfinite(payoffs_[i][a])) {
        throw Error(ErrorCode::kValidationError, "payoff is not finite",
                    field + "[" + std::to_string(a) + "]");
      }
    }
  }
  if (!std::isfinite(discount_) || discount_ <= 0.0) {
    throw Error(ErrorCode::kValidationError, "discount must be a positive finite number",
                "discount");
  }
  if (discount_ > 1.0) {
    warnings_.push_back("discount factor " + std::to_string(discount_) +
                        " exceeds 1 (negative riskless rate)");
  }
}

GameSpec GameSpec::from_dims(const std::vector<std::size_t>& dims,
                             std::vector<std::vector<double>> payoffs, double discount) {
  std::vector<Player> players;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    Player p{"P" + std::to_string(i + 1), {}};
    for (std::size_t s = 0; s < dims[i]; ++s) p.strategies.push_back(std::to_string(s));
    players.push_back(std::move(p));
  }
  return GameSpec(std::move(players), std::move(payoffs), discount);
}

std::size_t GameSpec::flat_index(std::span<const std::size_t> strategies) const {
  if (strategies.size() != dims_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "strategy tuple has wrong length");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (strategies[i] >= dims_[i]) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "strategy " + std::to_string(strategies[i]) + " of player " +
                      std::to_string(i) + " out of range");
    }
    index += strategies[i] * strides_[i];
  }
  return index;
}

GamePath GameSpec::path(std::size_t index) const {
  if (index >= path_count_) {
    throw Error(ErrorCode::kIndexOutOfRange, "path index " + std::to_string(index));
  }
  GamePath p;
  p.index = index;
  p.strategies.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) p.strategies[i] = strategy_of(index, i);
  return p;
}

std::string GameSpec::path_label(std::size_t index) const {
  std::string out;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    out += players_[i].name + players_[i].strategies[strategy_of(index, i)];
  }
  return out;
}

std::size_t GameSpec::find_player(const std::string& name) const {
  for (std::size_t i = 0; i < players_.size(); ++i) {
    if (players_[i].name == name) return i;
  }
  return players_.size();
}

GameSpec GameSpec::with_payoffs(std::size_t player, std::vector<double> payoffs) const {
  auto all = payoffs_;
  all.at(player) = std::move(payoffs);
  return GameSpec(players_, std::move(all), discount_);
}

std::vector<GamePath> enumerate_paths(const GameSpec& spec) {
  std::vector<GamePath> out;
  out.reserve(spec.path_count());
  for (std::size_t a = 0; a < spec.path_count(); ++a) out.push_back(spec.path(a));
  return out;
}

PriceKet PriceKet::raw(std::vector<cplx> amplitudes, double discount, double tol, Basis basis) {
  if (!(discount > 0.0)) {
    throw Error(ErrorCode::kValidationError, "discount must be positive", "discount");
  }
  const double norm = kernels::norm_squared(amplitudes);
  if (std::abs(norm - discount) > tol) {
    throw Error(ErrorCode::kNormMismatch, "sum |psi|^2 = " + std::to_string(norm) +
                                              " but D = " + std::to_string(discount));
  }
  return PriceKet(std::move(amplitudes), Normalization::kRaw, basis, discount);
}

PriceKet PriceKet::future_value(std::vector<cplx> amplitudes, double tol, Basis basis) {
  const double norm = kernels::norm_squared(amplitudes);
  if (std::abs(norm - 1.0) > tol) {
    throw Error(ErrorCode::kNormMismatch,
                "future-value ket must be unit norm, got " + std::to_string(norm));
  }
  return PriceKet(std::move(amplitudes), Normalization::kFutureValue, basis, 1.0);
}

double PriceKet::norm_squared() const { return kernels::norm_squared(amplitudes_); }

std::vector<double> PriceKet::capitalized_prices() const {
  std::vector<double> out(amplitudes_.size());
  kernels::squared_moduli(amplitudes_, out);
  if (scale_ != 1.0) {
    for (double& v : out) v /= scale_;
  }
  return out;
}

PayoffOperator PayoffOperator::for_player(const GameSpec& spec, std::size_t player) {
  const auto p = spec.payoffs(player);
  return PayoffOperator{{p.begin(), p.end()}};
}

PayoffOperator PayoffOperator::constant(std::size_t size, double value) {
  return PayoffOperator{std::vector<double>(size, value)};
}

PriceKet normalize_to_future_value(const PriceKet& psi, double discount, double tol) {
  const double norm = psi.norm_squared();
  if (std::abs(norm - discount) > tol) {
    throw Error(ErrorCode::kNormMismatch, "sum |psi|^2 = " + std::to_string(norm) +
                                              " but D = " + std::to_string(discount));
  }
  std::vector<cplx> q(psi.amplitudes().begin(), psi.amplitudes().end());
  kernels::scale(q, 1.0 / std::sqrt(discount));
  return PriceKet::future_value(std::move(q), tol, psi.basis());
}

double present_value(const PriceKet& q, const PayoffOperator& op, double discount) {
  const std::size_t n = op.diagonal.size();
  if (q.size() == n) {
    return discount * kernels::weighted_norm_squared(op.diagonal, q.amplitudes());
  }
  if (q.basis() == Basis::kGameLottery && q.size() == n * n) {
    // Joint index is path * N + outcome; the operator acts on the path factor.
    double acc = 0.0;
    const auto amps = q.amplitudes();
    for (std::size_t a = 0; a < n; ++a) {
      acc += op.diagonal[a] * kernels::norm_squared(amps.subspan(a * n, n));
    }
    return discount * acc;
  }
  throw Error(ErrorCode::kBasisMismatch, "operator of size " + std::to_string(n) +
                                             " cannot act on ket of size " +
                                             std::to_string(q.size()));
}

namespace {

void require_game_ket(const GameSpec& spec, const PriceKet& q) {
  if (q.size() != spec.path_count()) {
    throw Error(ErrorCode::kBasisMismatch, "ket has " + std::to_string(q.size()) +
                                               " amplitudes, game has " +
                                               std::to_string(spec.path_count()) + " paths");
  }
}

}  // namespace

cplx pricing_functional(const GameSpec& spec, const PriceKet& q, std::size_t player,
                        std::size_t f, std::size_t g) {
  require_game_ket(spec, q);
  if (player >= spec.player_count() || f >= spec.dim(player) || g >= spec.dim(player)) {
    throw Error(ErrorCode::kIndexOutOfRange, "pricing functional index out of range");
  }
  const auto amps = q.amplitudes();
  cplx acc{0.0, 0.0};
  for (std::size_t a = 0; a < amps.size(); ++a) {
    const std::size_t s = spec.strategy_of(a, player);
    const cplx left = s == f ? amps[a] : cplx{};
    const cplx right = s == g ? amps[a] : cplx{};
    acc += std::conj(left) * right;
  }
  return acc;
}

PricingMatrixTuple pricing_matrices(const GameSpec& spec, const PriceKet& q) {
  require_game_ket(spec, q);
  std::vector<double> prices(q.size());
  kernels::squared_moduli(q.amplitudes(), prices);

  PricingMatrixTuple out;
  out.reserve(spec.player_count());
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    PricingMatrix m{i, std::vector<double>(spec.dim(i), 0.0)};
    for (std::size_t a = 0; a < prices.size(); ++a) m.weights[spec.strategy_of(a, i)] += prices[a];
    out.push_back(std::move(m));
  }
  return out;
}

bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Eigen::MatrixXcd gram = u.adjoint() * u;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return (gram - id).cwiseAbs().maxCoeff() <= tol;
}

PriceKet apply_unitary(const PriceKet& q, const Eigen::MatrixXcd& u, double tol) {
  if (u.rows() != static_cast<Eigen::Index>(q.size()) || u.cols() != u.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "unitary does not match ket size");
  }
  if (!is_unitary(u, tol)) throw Error(ErrorCode::kNotUnitary, "U^dagger U != I");

  const auto amps = q.amplitudes();
  const Eigen::Map<const Eigen::VectorXcd> in(amps.data(), static_cast<Eigen::Index>(amps.size()));
  const Eigen::VectorXcd rotated = u * in;
  std::vector<cplx> out(rotated.data(), rotated.data() + rotated.size());
  if (q.normalization() == Normalization::kRaw) {
    return PriceKet::raw(std::move(out), q.scale(), tol, q.basis());
  }
  return PriceKet::future_value(std::move(out), tol, q.basis());
}

bool check_price_conserving(const Eigen::MatrixXcd& u, const PriceKet& q, double tol) {
  const PriceKet rotated = apply_unitary(q, u, std::max(tol, Tolerances{}.construction));
  const auto before = q.capitalized_prices();
  const auto after = rotated.capitalized_prices();
  for (std::size_t a = 0; a < before.size(); ++a) {
    if (std::abs(after[a] - before[a]) > tol) return false;
  }
  return true;
}

std::vector<std::size_t> sample_path_indices(const PriceKet& q, std::size_t count,
                                             std::uint64_t seed) {
  std::vector<double> weights(q.size());
  kernels::squared_moduli(q.amplitudes(), weights);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  std::vector<std::size_t> out(count);
  for (auto& v : out) v = dist(rng);
  return out;
}

GamePath sample_path(const GameSpec& spec, const PriceKet& q, std::uint64_t seed) {
  require_game_ket(spec, q);
  return spec.path(sample_path_indices(q, 1, seed).front());
}

std::size_t schmidt_rank(const GameSpec& spec, const PriceKet& q, double tol) {
  if (spec.player_count() != 2) {
    throw Error(ErrorCode::kNotBimatrix, "schmidt rank needs a 2-player game");
  }
  require_game_ket(spec, q);
  Eigen::MatrixXcd m(spec.dim(1), spec.dim(0));
  for (std::size_t a = 0; a < q.size(); ++a) {
    m(spec.strategy_of(a, 1), spec.strategy_of(a, 0)) = q.amplitudes()[a];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > tol * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace qnash
