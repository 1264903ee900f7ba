#pragma once

// Finite games as tensor-indexed path spaces carrying complex price amplitudes.
//
// Paths are flattened row-major with player 0 as the fastest-varying factor and
// the last player as the slowest, so for players (A, B) the order is
// B0A0, B0A1, B1A0, B1A1. All indices in this API are 0-based.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qnash {

using cplx = std::complex<double>;

struct Tolerances {
  double construction = 1e-9;  // checks on user-supplied data
  double property = 1e-12;     // identities that hold up to rounding
};

inline constexpr std::size_t kMaxPaths = 1'000'000;

struct Player {
  std::string name;
  std::vector<std::string> strategies;
};

struct GamePath {
  std::vector<std::size_t> strategies;  // one entry per player
  std::size_t index = 0;

  bool operator==(const GamePath&) const = default;
};

class GameSpec {
 public:
  // Validates on construction; throws Error(kValidationError) with a field path.
  GameSpec(std::vector<Player> players, std::vector<std::vector<double>> payoffs,
           double discount);

  // Players named P1..Pn with strategies "0".."d-1".
  static GameSpec from_dims(const std::vector<std::size_t>& dims,
                            std::vector<std::vector<double>> payoffs,
                            double discount = 1.0);

  std::size_t player_count() const { return players_.size(); }
  std::size_t path_count() const { return path_count_; }
  std::size_t dim(std::size_t player) const { return dims_[player]; }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t stride(std::size_t player) const { return strides_[player]; }
  const Player& player(std::size_t i) const { return players_[i]; }
  std::span<const double> payoffs(std::size_t player) const { return payoffs_[player]; }
  double discount() const { return discount_; }

  // Non-fatal findings, e.g. a discount factor above one.
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t flat_index(std::span<const std::size_t> strategies) const;
  std::size_t strategy_of(std::size_t path, std::size_t player) const {
    return (path / strides_[player]) % dims_[player];
  }
  GamePath path(std::size_t index) const;
  // "B1A0" style label, slowest player first.
  std::string path_label(std::size_t index) const;

  // Index of a player by name, or player_count() if absent.
  std::size_t find_player(const std::string& name) const;

  // Same game with one player's payoffs replaced.
  GameSpec with_payoffs(std::size_t player, std::vector<double> payoffs) const;

 private:
  std::vector<Player> players_;
  std::vector<std::vector<double>> payoffs_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t path_count_ = 0;
  double discount_ = 1.0;
  std::vector<std::string> warnings_;
};

std::vector<GamePath> enumerate_paths(const GameSpec& spec);

enum class Normalization { kRaw, kFutureValue };
enum class Basis { kGame, kGameLottery };

// Price-amplitude vector. RAW kets carry sum |psi|^2 = D; FUTURE_VALUE kets are
// unit norm and their squared moduli are the capitalized Arrow-Debreu prices.
class PriceKet {
 public:
  PriceKet() = default;  // empty ket, only useful as a placeholder

  static PriceKet raw(std::vector<cplx> amplitudes, double discount,
                      double tol = Tolerances{}.construction, Basis basis = Basis::kGame);
  static PriceKet future_value(std::vector<cplx> amplitudes,
                               double tol = Tolerances{}.construction,
                               Basis basis = Basis::kGame);

  std::span<const cplx> amplitudes() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  Normalization normalization() const { return normalization_; }
  Basis basis() const { return basis_; }
  // D for RAW kets, 1 for FUTURE_VALUE kets.
  double scale() const { return scale_; }

  double norm_squared() const;
  // |amplitude|^2 / scale(); nonnegative and summing to one.
  std::vector<double> capitalized_prices() const;

 private:
  PriceKet(std::vector<cplx> amplitudes, Normalization n, Basis b, double scale)
      : amplitudes_(std::move(amplitudes)), normalization_(n), basis_(b), scale_(scale) {}

  std::vector<cplx> amplitudes_;
  Normalization normalization_ = Normalization::kFutureValue;
  Basis basis_ = Basis::kGame;
  double scale_ = 1.0;
};

// Diagonal operator sum_a w[a] |a><a| in the path basis.
struct PayoffOperator {
  std::vector<double> diagonal;

  static PayoffOperator for_player(const GameSpec& spec, std::size_t player);
  static PayoffOperator constant(std::size_t size, double value);
};

struct PricingMatrix {
  std::size_t player = 0;
  std::vector<double> weights;
};

using PricingMatrixTuple = std::vector<PricingMatrix>;

PriceKet normalize_to_future_value(const PriceKet& psi, double discount,
                                   double tol = Tolerances{}.construction);

// D <Q|op|Q>. A joint game-lottery ket of size N*N accepts an operator of size N,
// which is then lifted to act on the game factor.
double present_value(const PriceKet& q, const PayoffOperator& op, double discount);

// <Q| C_f^dagger C_g |Q> where C_f projects on paths with `player` playing f.
cplx pricing_functional(const GameSpec& spec, const PriceKet& q, std::size_t player,
                        std::size_t f, std::size_t g);

PricingMatrixTuple pricing_matrices(const GameSpec& spec, const PriceKet& q);

bool is_unitary(const Eigen::MatrixXcd& u, double tol = Tolerances{}.construction);
// Throws kNotUnitary or kDimensionMismatch.
PriceKet apply_unitary(const PriceKet& q, const Eigen::MatrixXcd& u,
                       double tol = Tolerances{}.construction);
// True iff every capitalized price moves by at most tol under u.
bool check_price_conserving(const Eigen::MatrixXcd& u, const PriceKet& q,
                            double tol = Tolerances{}.construction);

// Draws a path with probability |q_a|^2 / <Q|Q>.
GamePath sample_path(const GameSpec& spec, const PriceKet& q, std::uint64_t seed);
std::vector<std::size_t> sample_path_indices(const PriceKet& q, std::size_t count,
                                             std::uint64_t seed);

// Rank of the amplitude matrix when a 2-player ket is split between players;
// 1 means the ket is a product of per-player kets.
std::size_t schmidt_rank(const GameSpec& spec, const PriceKet& q, double tol = 1e-10);

}  // namespace qnash
