#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qnash/equilibrium.hpp"
#include "qnash/error.hpp"
#include "qnash/lottery.hpp"

using namespace qnash;
using oracle::cplx;

namespace {

PriceKet reference_ket() {
  const double a = std::sqrt(5.0 / 32), b = std::sqrt(11.0 / 32);
  return PriceKet::future_value({a, b, a, b});
}

const std::vector<double> kPrices{5.0 / 32, 11.0 / 32, 5.0 / 32, 11.0 / 32};

// Explicit index loops over psi(path, outcome).
Eigen::MatrixXcd loop_trace_lottery(const JointKet& k) {
  const std::size_t n = k.path_count();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t w = 0; w < n; ++w) r(a, b) += k.amplitude(a, w) * std::conj(k.amplitude(b, w));
  return r;
}

Eigen::MatrixXcd loop_trace_game(const JointKet& k) {
  const std::size_t n = k.path_count();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t a = 0; a < n; ++a) r(w, v) += k.amplitude(a, w) * std::conj(k.amplitude(a, v));
  return r;
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("entangling the equilibrium ket") {
  const auto joint = entangle(reference_ket());
  CHECK(joint.entangled_diagonal());
  for (std::size_t w = 0; w < 4; ++w) {
    CHECK(std::norm(joint.amplitude(w, w)) == doctest::Approx(kPrices[w]).epsilon(1e-14));
    for (std::size_t a = 0; a < 4; ++a)
      if (a != w) CHECK(joint.amplitude(a, w) == cplx{});
  }
  const auto det = entangle(PriceKet::future_value({0, 1, 0, 0}));
  CHECK(det.amplitude(1, 1) == cplx(1.0));
  CHECK(det.norm_squared() == 1.0);

  const auto proj = apply_lottery_operator(joint);
  CHECK(proj.norm_squared == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t w = 0; w < 4; ++w) CHECK(proj.ket.amplitude(w, w) == joint.amplitude(w, w));

  CHECK_THROWS_AS(entangle(PriceKet::future_value({1, 0, 0, 0}, 1e-9, Basis::kGameLottery)), Error);
}

TEST_CASE("lottery operator projects onto the diagonal") {
  const std::size_t n = 3;
  std::vector<cplx> uniform(n * n, cplx(1.0 / 3.0));
  const auto proj = apply_lottery_operator(JointKet::dense(n, uniform));
  CHECK(proj.norm_squared == doctest::Approx(1.0 / n).epsilon(1e-14));
  CHECK(proj.ket.entangled_diagonal());

  std::vector<cplx> off(n * n, cplx{});
  off[0 * n + 1] = 1.0;
  CHECK(apply_lottery_operator(JointKet::dense(n, off)).norm_squared == 0.0);
}

TEST_CASE("partial traces of the equilibrium lottery") {
  const auto joint = entangle(reference_ket());
  const auto rg = trace_out_lottery(joint);
  const auto rl = trace_out_game(joint);
  CHECK(rg.subsystem == Subsystem::kGame);
  CHECK(rl.subsystem == Subsystem::kLottery);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(rg.diagonal()[k] == doctest::Approx(kPrices[k]).epsilon(1e-14));
    CHECK(rl.diagonal()[k] == doctest::Approx(kPrices[k]).epsilon(1e-14));
  }
  CHECK(max_diff(rg.matrix, Eigen::MatrixXcd(rg.matrix.diagonal().asDiagonal())) == 0.0);

  std::vector<cplx> one(16, cplx{});
  one[2 * 4 + 3] = 1.0;
  const auto pure = trace_out_lottery(JointKet::dense(4, one));
  CHECK(pure.rank() == 1);
  CHECK(pure.matrix(2, 2) == cplx(1.0));
}

TEST_CASE("partial traces agree with explicit loops on random kets") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u}) {
    const auto dense = JointKet::dense(n, oracle::random_unit_ket(rng, n * n));
    CHECK(max_diff(trace_out_lottery(dense).matrix, loop_trace_lottery(dense)) <= 1e-14);
    CHECK(max_diff(trace_out_game(dense).matrix, loop_trace_game(dense)) <= 1e-14);
    // Both reductions of a pure state share their nonzero spectrum.
    auto sg = trace_out_lottery(dense).spectrum(), sl = trace_out_game(dense).spectrum();
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(sg[k] - sl[k]) <= 1e-12);

    const auto diag = JointKet::diagonal(oracle::random_unit_ket(rng, n));
    CHECK(max_diff(trace_out_lottery(diag).matrix, loop_trace_lottery(diag)) <= 1e-15);
    auto spectrum = trace_out_lottery(diag).spectrum();
    std::vector<double> sq;
    for (auto z : diag.diagonal_amplitudes()) sq.push_back(std::norm(z));
    std::sort(sq.begin(), sq.end());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(spectrum[k] - sq[k]) <= 1e-14);
  }
}

TEST_CASE("partial trace of a product state") {
  std::mt19937_64 rng(4);
  const std::size_t n = 4;
  const auto q = oracle::random_unit_ket(rng, n), r = oracle::random_unit_ket(rng, n);
  std::vector<cplx> prod(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t w = 0; w < n; ++w) prod[a * n + w] = q[a] * r[w];
  const auto rl = trace_out_game(JointKet::dense(n, prod));
  for (std::size_t w = 0; w < n; ++w) CHECK(rl.diagonal()[w] == doctest::Approx(std::norm(r[w])).epsilon(1e-13));
  CHECK(rl.rank(1e-10) == 1);
}

TEST_CASE("rational beliefs") {
  const auto b = rational_beliefs(entangle(reference_ket()), 1.0);
  CHECK(oracle::linf(b, kPrices) <= 1e-15);

  const auto det = rational_beliefs(entangle(PriceKet::future_value({0, 0, 1, 0})), 1.0);
  CHECK(det == std::vector<double>{0, 0, 1, 0});

  // Raw amplitudes scaled by sqrt(D) give the same beliefs.
  std::vector<cplx> raw;
  const auto pk = reference_ket();
  for (auto z : pk.amplitudes()) raw.push_back(z * std::sqrt(0.8));
  CHECK(oracle::linf(rational_beliefs(JointKet::diagonal(raw), 0.8), kPrices) <= 1e-15);

  CHECK_THROWS_AS(rational_beliefs(JointKet::diagonal({0.5, 0.5}), 0.9), Error);
  CHECK_THROWS_AS(rational_beliefs(JointKet::dense(1, {1.0}), 1.0), Error);
}

TEST_CASE("partial trace rejects non-unit kets") {
  CHECK_THROWS_AS(trace_out_lottery(JointKet::diagonal({0.5, 0.5})), Error);
}
