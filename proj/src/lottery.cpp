#include "qnash/lottery.hpp"

#include <cmath>

#include "qnash/error.hpp"
#include "qnash/kernels.hpp"

namespace qnash {

JointKet JointKet::diagonal(std::vector<cplx> amplitudes) {
  const std::size_t n = amplitudes.size();
  return JointKet(n, std::move(amplitudes), true);
}

JointKet JointKet::dense(std::size_t path_count, std::vector<cplx> amplitudes) {
  if (amplitudes.size() != path_count * path_count) {
    throw Error(ErrorCode::kDimensionMismatch, "dense joint ket needs N*N amplitudes");
  }
  return JointKet(path_count, std::move(amplitudes), false);
}

cplx JointKet::amplitude(std::size_t path, std::size_t outcome) const {
  if (path >= path_count_ || outcome >= path_count_) {
    throw Error(ErrorCode::kIndexOutOfRange, "joint index out of range");
  }
  if (diagonal_) return path == outcome ? amplitudes_[path] : cplx{};
  return amplitudes_[path * path_count_ + outcome];
}

double JointKet::norm_squared() const { return kernels::norm_squared(amplitudes_); }

std::span<const cplx> JointKet::diagonal_amplitudes() const {
  if (!diagonal_) {
    throw Error(ErrorCode::kPreconditionViolation, "joint ket is not entangled-diagonal");
  }
  return amplitudes_;
}

Eigen::MatrixXcd JointKet::as_matrix() const {
  const auto n = static_cast<Eigen::Index>(path_count_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (diagonal_) {
      m(a, a) = amplitudes_[a];
    } else {
      for (Eigen::Index w = 0; w < n; ++w) m(a, w) = amplitudes_[a * n + w];
    }
  }
  return m;
}

PriceKet JointKet::to_price_ket() const {
  std::vector<cplx> amps(path_count_ * path_count_, cplx{});
  for (std::size_t a = 0; a < path_count_; ++a) {
    for (std::size_t w = 0; w < path_count_; ++w) amps[a * path_count_ + w] = amplitude(a, w);
  }
  return PriceKet::future_value(std::move(amps), Tolerances{}.construction, Basis::kGameLottery);
}

bool DensityOperator::is_hermitian(double tol) const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<double> DensityOperator::diagonal() const {
  std::vector<double> out(matrix.rows());
  for (Eigen::Index k = 0; k < matrix.rows(); ++k) out[k] = matrix(k, k).real();
  return out;
}

std::vector<double> DensityOperator::spectrum() const {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::size_t DensityOperator::rank(double tol) const {
  std::size_t r = 0;
  for (double v : spectrum()) {
    if (v > tol) ++r;
  }
  return r;
}

JointKet entangle(const PriceKet& game_ket) {
  if (game_ket.basis() != Basis::kGame) {
    throw Error(ErrorCode::kBasisMismatch, "entangle expects a game-basis ket");
  }
  return JointKet::diagonal({game_ket.amplitudes().begin(), game_ket.amplitudes().end()});
}

LotteryProjection apply_lottery_operator(const JointKet& ket) {
  const std::size_t n = ket.path_count();
  std::vector<cplx> diag(n);
  for (std::size_t a = 0; a < n; ++a) diag[a] = ket.amplitude(a, a);
  const double mass = kernels::norm_squared(diag);
  return {JointKet::diagonal(std::move(diag)), mass};
}

namespace {

void require_unit(const JointKet& ket) {
  const double norm = ket.norm_squared();
  if (std::abs(norm - 1.0) > Tolerances{}.construction) {
    throw Error(ErrorCode::kNormMismatch,
                "partial trace expects a unit joint ket, norm^2 = " + std::to_string(norm));
  }
  if (ket.path_count() > kMaxDensityDim) {
    throw Error(ErrorCode::kDimensionMismatch, "density operator dimension above " +
                                                   std::to_string(kMaxDensityDim));
  }
}

}  // namespace

DensityOperator trace_out_lottery(const JointKet& ket) {
  require_unit(ket);
  const auto n = static_cast<Eigen::Index>(ket.path_count());
  if (ket.entangled_diagonal()) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    const auto d = ket.diagonal_amplitudes();
    for (Eigen::Index a = 0; a < n; ++a) rho(a, a) = std::norm(d[a]);
    return {Subsystem::kGame, std::move(rho)};
  }
  const Eigen::MatrixXcd m = ket.as_matrix();
  return {Subsystem::kGame, m * m.adjoint()};
}

DensityOperator trace_out_game(const JointKet& ket) {
  require_unit(ket);
  const auto n = static_cast<Eigen::Index>(ket.path_count());
  if (ket.entangled_diagonal()) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    const auto d = ket.diagonal_amplitudes();
    for (Eigen::Index w = 0; w < n; ++w) rho(w, w) = std::norm(d[w]);
    return {Subsystem::kLottery, std::move(rho)};
  }
  const Eigen::MatrixXcd m = ket.as_matrix();
  return {Subsystem::kLottery, m.transpose() * m.conjugate()};
}

std::vector<double> rational_beliefs(const JointKet& ket, double discount, double tol) {
  const auto diag = ket.diagonal_amplitudes();
  const double norm = kernels::norm_squared(diag);
  double scale = 0.0;
  if (std::abs(norm - discount) <= tol) {
    scale = discount;
  } else if (std::abs(norm - 1.0) <= tol) {
    scale = 1.0;
  } else {
    throw Error(ErrorCode::kNormMismatch, "joint ket norm^2 " + std::to_string(norm) +
                                              " matches neither D nor 1");
  }
  std::vector<double> bel(diag.size());
  kernels::squared_moduli(diag, bel);
  for (double& b : bel) b /= scale;
  return bel;
}

}  // namespace qnash
