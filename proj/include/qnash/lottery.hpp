#pragma once

// Single-bet lottery entangled with a game: one lottery outcome per path.
// Joint basis elements |path, outcome> are indexed path * N + outcome.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qnash/game.hpp"

namespace qnash {

class JointKet {
 public:
  // Support only on outcome == path.
  static JointKet diagonal(std::vector<cplx> amplitudes);
  // Arbitrary support; `amplitudes` has N*N entries.
  static JointKet dense(std::size_t path_count, std::vector<cplx> amplitudes);

  std::size_t path_count() const { return path_count_; }
  bool entangled_diagonal() const { return diagonal_; }
  cplx amplitude(std::size_t path, std::size_t outcome) const;
  double norm_squared() const;
  // Diagonal amplitudes psi(f_w, w); requires entangled_diagonal().
  std::span<const cplx> diagonal_amplitudes() const;
  // N x N matrix M(path, outcome).
  Eigen::MatrixXcd as_matrix() const;
  // Dense joint-basis ket; throws kNormMismatch unless unit norm.
  PriceKet to_price_ket() const;

 private:
  JointKet(std::size_t n, std::vector<cplx> amps, bool diagonal)
      : path_count_(n), amplitudes_(std::move(amps)), diagonal_(diagonal) {}

  std::size_t path_count_ = 0;
  std::vector<cplx> amplitudes_;  // N entries when diagonal, N*N otherwise
  bool diagonal_ = false;
};

enum class Subsystem { kGame, kLottery };

struct DensityOperator {
  Subsystem subsystem = Subsystem::kGame;
  Eigen::MatrixXcd matrix;

  double trace() const { return matrix.trace().real(); }
  bool is_hermitian(double tol) const;
  std::vector<double> diagonal() const;
  // Ascending eigenvalues.
  std::vector<double> spectrum() const;
  std::size_t rank(double tol = 1e-12) const;
};

// Places each game amplitude on its matching lottery outcome.
JointKet entangle(const PriceKet& game_ket);

struct LotteryProjection {
  JointKet ket;
  double norm_squared = 0.0;  // mass surviving the projection
};

// Keeps outcome == path components and annihilates the rest.
LotteryProjection apply_lottery_operator(const JointKet& ket);

inline constexpr std::size_t kMaxDensityDim = 4096;

DensityOperator trace_out_lottery(const JointKet& ket);
DensityOperator trace_out_game(const JointKet& ket);

// bel(w) = |psi(f_w, w)|^2 / D. The ket may carry sum |psi|^2 = D (raw prices)
// or unit norm, in which case D has already been divided out.
std::vector<double> rational_beliefs(const JointKet& ket, double discount,
                                     double tol = Tolerances{}.construction);

}  // namespace qnash
