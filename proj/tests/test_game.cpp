#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qnash/error.hpp"
#include "qnash/game.hpp"

using namespace qnash;
using oracle::cplx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected qnash::Error");
  return ErrorCode::kParseError;
}

std::string field_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.field();
  }
  return "<no error>";
}

PriceKet equilibrium_ket() {
  const double a = std::sqrt(5.0 / 32), b = std::sqrt(11.0 / 32);
  return PriceKet::future_value({a, b, a, b});
}

}  // namespace

TEST_CASE("path enumeration follows the canonical order") {
  const auto g = oracle::two_company();
  const auto paths = enumerate_paths(g);
  REQUIRE(paths.size() == 4);
  // Player 0 varies fastest: B0A0, B0A1, B1A0, B1A1.
  const std::vector<std::vector<std::size_t>> expect{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(paths[k].strategies == expect[k]);
    CHECK(paths[k].index == k);
  }
  CHECK(g.path_label(1) == "P20P11");

  const auto single = GameSpec::from_dims({1, 1, 1}, {{1}, {2}, {3}});
  CHECK(enumerate_paths(single).size() == 1);
  CHECK(single.flat_index(std::vector<std::size_t>{0, 0, 0}) == 0);
}

TEST_CASE("flat index round-trips against brute-force enumeration") {
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{3, 2}, {2, 3}, {2, 3, 4}, {4, 1, 2}}) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    std::vector<std::vector<double>> pay(dims.size(), std::vector<double>(n, 0.0));
    const auto g = GameSpec::from_dims(dims, pay);
    // Odometer with player 0 fastest.
    std::vector<std::size_t> s(dims.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(g.flat_index(s) == k);
      CHECK(g.path(k).strategies == s);
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (++s[i] < dims[i]) break;
        s[i] = 0;
      }
    }
  }
  // Last strategy of each player in a 3x2 game is the last (sixth) path.
  const auto g = GameSpec::from_dims({3, 2}, {std::vector<double>(6), std::vector<double>(6)});
  CHECK(g.flat_index(std::vector<std::size_t>{2, 1}) == 5);
}

TEST_CASE("game validation reports field paths") {
  CHECK(field_of([] { GameSpec::from_dims({2, 2}, {{1, 2, 3}, {1, 2, 3, 4}}); }) == "payoffs.P1");
  CHECK(field_of([] { GameSpec::from_dims({2}, {{1, 2}}, -0.5); }) == "discount");
  CHECK(field_of([] { GameSpec::from_dims({2}, {{1, NAN}}); }) == "payoffs.P1[1]");
  CHECK(field_of([] { GameSpec::from_dims({2, 0}, {{}, {}}); }) == "players[1].strategies");
  const auto g = GameSpec::from_dims({1}, {{1}}, 1.5);
  CHECK(g.warnings().size() == 1);
}

TEST_CASE("future-value normalization") {
  const auto same = normalize_to_future_value(PriceKet::raw({0.6, cplx(0, 0.8)}, 1.0), 1.0);
  CHECK(same.amplitudes()[0] == cplx(0.6));
  CHECK(same.amplitudes()[1] == cplx(0, 0.8));

  const auto q = normalize_to_future_value(PriceKet::raw({0.5, 0, 0, 0}, 0.25), 0.25);
  CHECK(q.amplitudes()[0].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q.normalization() == Normalization::kFutureValue);

  std::mt19937_64 rng(7);
  auto v = oracle::random_unit_ket(rng, 4);
  for (auto& z : v) z *= std::sqrt(0.9);
  const auto r = normalize_to_future_value(PriceKet::raw(v, 0.9), 0.9);
  CHECK(std::abs(r.norm_squared() - 1.0) <= 1e-12);

  CHECK(code_of([] { normalize_to_future_value(PriceKet::raw({1.0, 0.0}, 1.0), 0.5); }) ==
        ErrorCode::kNormMismatch);
  CHECK(code_of([] { PriceKet::future_value({0.5, 0.5}); }) == ErrorCode::kNormMismatch);
}

TEST_CASE("present values on the two-company equilibrium") {
  const auto g = oracle::two_company();
  const auto q = equilibrium_ket();
  // Direct sum of |q|^2 x over paths.
  double pa = 0, pb = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    pa += std::norm(q.amplitudes()[k]) * g.payoffs(0)[k];
    pb += std::norm(q.amplitudes()[k]) * g.payoffs(1)[k];
  }
  CHECK(present_value(q, PayoffOperator::for_player(g, 0), 1.0) == doctest::Approx(pa).epsilon(1e-14));
  CHECK(present_value(q, PayoffOperator::for_player(g, 0), 1.0) == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(present_value(q, PayoffOperator::for_player(g, 1), 1.0) == doctest::Approx(pb).epsilon(1e-14));
  CHECK(present_value(q, PayoffOperator::for_player(g, 1), 1.0) == doctest::Approx(2.15625).epsilon(1e-14));
  CHECK(present_value(q, PayoffOperator::constant(4, 0.0), 1.0) == 0.0);
  CHECK(present_value(q, PayoffOperator::constant(4, 1.0), 0.8) == doctest::Approx(0.8));
  CHECK(code_of([&] { present_value(q, PayoffOperator::constant(3, 1.0), 1.0); }) ==
        ErrorCode::kBasisMismatch);
}

TEST_CASE("pricing functional and pricing matrices") {
  const auto g = oracle::two_company();
  const auto q = equilibrium_ket();
  CHECK(pricing_functional(g, q, 0, 0, 0).real() == doctest::Approx(5.0 / 16).epsilon(1e-14));
  CHECK(std::abs(pricing_functional(g, q, 1, 0, 1)) == 0.0);
  CHECK(code_of([&] { pricing_functional(g, q, 2, 0, 0); }) == ErrorCode::kIndexOutOfRange);
  CHECK(code_of([&] { pricing_functional(g, q, 0, 0, 2); }) == ErrorCode::kIndexOutOfRange);

  const auto m = pricing_matrices(g, q);
  CHECK(oracle::linf(m[0].weights, {5.0 / 16, 11.0 / 16}) <= 1e-14);
  CHECK(oracle::linf(m[1].weights, {0.5, 0.5}) <= 1e-14);

  const auto vertex = PriceKet::future_value({0, 0, 1, 0});
  const auto mv = pricing_matrices(g, vertex);
  CHECK(mv[0].weights == std::vector<double>{1, 0});
  CHECK(mv[1].weights == std::vector<double>{0, 1});

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto rg = oracle::random_game(rng, {2, 3, 4});
    const auto rq = PriceKet::future_value(oracle::random_unit_ket(rng, rg.path_count()));
    const auto rm = pricing_matrices(rg, rq);
    for (std::size_t i = 0; i < rg.player_count(); ++i) {
      cplx diag_sum = 0;
      for (std::size_t f = 0; f < rg.dim(i); ++f) diag_sum += pricing_functional(rg, rq, i, f, f);
      CHECK(std::abs(diag_sum - 1.0) <= 1e-12);
      double row = 0;
      for (double w : rm[i].weights) row += w;
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("unitary actions") {
  const auto q = equilibrium_ket();
  Eigen::MatrixXcd phases = Eigen::MatrixXcd::Zero(4, 4);
  for (int k = 0; k < 4; ++k) phases(k, k) = std::polar(1.0, 0.3 * (k + 1));
  CHECK(check_price_conserving(phases, q, 1e-12));

  const auto same = apply_unitary(q, Eigen::MatrixXcd::Identity(4, 4));
  for (std::size_t k = 0; k < 4; ++k) CHECK(same.amplitudes()[k] == q.amplitudes()[k]);

  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  Eigen::MatrixXcd rot(2, 2);
  rot << c, -s, s, c;
  const auto e0 = PriceKet::future_value({1.0, 0.0});
  const auto out = apply_unitary(e0, rot).capitalized_prices();
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(check_price_conserving(rot, e0, 1e-12));

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 2.0;
  CHECK(code_of([&] { apply_unitary(e0, bad); }) == ErrorCode::kNotUnitary);
  CHECK(code_of([&] { apply_unitary(e0, Eigen::MatrixXcd::Identity(3, 3)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("path sampling") {
  const auto g = oracle::two_company();
  const auto det = PriceKet::future_value({0, 0, 0, 1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(sample_path(g, det, seed).index == 3);

  const auto uniform = PriceKet::future_value({0.5, 0.5, 0.5, 0.5});
  const auto draws = sample_path_indices(uniform, 100000, 11);
  std::map<std::size_t, double> freq;
  for (auto k : draws) freq[k] += 1.0 / draws.size();
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(freq[k] - 0.25) <= 0.01);
  CHECK(sample_path_indices(uniform, 1000, 5) == sample_path_indices(uniform, 1000, 5));
}

TEST_CASE("schmidt rank separates product and entangled kets") {
  const auto g = oracle::two_company();
  CHECK(schmidt_rank(g, equilibrium_ket()) == 1);
  const double r = std::sqrt(0.5);
  CHECK(schmidt_rank(g, PriceKet::future_value({0, r, r, 0})) == 2);
}
