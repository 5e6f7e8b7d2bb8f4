#include <doctest.h>

#include <algorithm>
#include <array>

#include "toric/error.hpp"
#include "toric/fiber.hpp"
#include "toric/metropolis.hpp"
#include "toric/presets.hpp"
#include "toric/rng.hpp"
#include "toric/sampler.hpp"

using namespace toric;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no toric::Error thrown");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("two-way basis") {
  const auto basis = basis_two_way(4, 5);
  CHECK(basis.size() == 60);
  CHECK_NOTHROW(validate_moves(validate_matrix(two_way_independence_matrix(4, 5)), basis));
  CHECK(basis_two_way(2, 2).front().delta == std::vector<std::int64_t>{1, -1, -1, 1});
  CHECK(code_of([] { basis_two_way(1, 3); }) == Errc::InvalidArgument);
}

TEST_CASE("no-three-way basis: 9 degree-4 and 6 degree-6 moves") {
  const auto basis = basis_no_three_way();
  REQUIRE(basis.size() == 15);
  CHECK_NOTHROW(validate_moves(validate_matrix(no_three_way_matrix()), basis));
  for (std::size_t k = 0; k < 15; ++k) {
    std::int64_t plus = 0;
    for (auto v : basis[k].delta) plus += std::max<std::int64_t>(v, 0);
    CHECK(plus == (k < 9 ? 4 : 6));
  }
  // Permutations (1,3,2) and (2,1,3) of the third index, 0-based here.
  std::vector<std::int64_t> expected(18, 0);
  const std::array<int, 3> p{0, 2, 1}, q{1, 0, 2};
  for (int j = 0; j < 3; ++j) {
    expected[3 * j + p[j]] += 1;
    expected[9 + 3 * j + q[j]] += 1;
    expected[3 * j + q[j]] -= 1;
    expected[9 + 3 * j + p[j]] -= 1;
  }
  std::vector<std::int64_t> negated(expected);
  for (auto& v : negated) v = -v;
  CHECK(std::any_of(basis.begin(), basis.end(), [&](const Move& m) { return m.delta == expected || m.delta == negated; }));
}

TEST_CASE("move validation") {
  const auto a = validate_matrix(two_way_independence_matrix(2, 2));
  CHECK(code_of([&] { validate_moves(a, {Move{{1, -1, -1}}}); }) == Errc::InvalidMove);
  CHECK(code_of([&] { validate_moves(a, {Move{{0, 0, 0, 0}}}); }) == Errc::InvalidMove);
  CHECK(code_of([&] { validate_moves(a, {Move{{1, -1, 0, 0}}}); }) == Errc::InvalidMove);
}

TEST_CASE("chains stay in the fiber and count proposals") {
  const auto p = preset("no3way-2x3x3", 1);
  ChainConfig config;
  config.burn_in = 100;
  config.length = 1000;
  config.seed = 9;
  config.initial_table = p.initial_table;
  const auto r = run_chain(p.model, config, *p.basis, 10);
  CHECK(r.states.size() == 100);
  CHECK(r.accepted.size() == 100);
  CHECK(r.proposals == 1100);
  CHECK(r.acceptances <= r.proposals);
  CHECK(r.acceptance_rate() > 0.0);
  for (const auto& s : r.states) CHECK(sufficient_statistics(p.model.matrix(), s) == p.b);

  const auto again = run_chain(p.model, config, *p.basis, 10);
  CHECK(again.states == r.states);
}

TEST_CASE("chain argument errors") {
  const auto p = preset("indep-2x2", 1);
  ChainConfig config;
  config.length = 10;
  config.initial_table = CountVector({1, 0, 1});
  CHECK(code_of([&] { run_chain(p.model, config, *p.basis); }) == Errc::DimensionMismatch);
  config.initial_table = p.initial_table;
  config.length = -1;
  CHECK(code_of([&] { run_chain(p.model, config, *p.basis); }) == Errc::InvalidArgument);
  config.length = 10;
  CHECK(code_of([&] { run_chain(p.model, config, *p.basis, 0); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { run_chain(p.model, config, {Move{{1, 1, -1, -1}}}); }) == Errc::InvalidMove);
}

TEST_CASE("2x2 chain is stationary at the conditional distribution") {
  // [DERIVED] fiber oracle: P(1,0,1,1) = 2/3.
  const auto p = preset("indep-2x2", 1);
  ChainConfig config;
  config.burn_in = 1000;
  config.length = 200000;
  config.seed = 4;
  config.initial_table = p.initial_table;
  const auto r = run_chain(p.model, config, *p.basis);
  std::size_t hits = 0;
  for (const auto& s : r.states) hits += s == CountVector({1, 0, 1, 1});
  CHECK(static_cast<double>(hits) / static_cast<double>(r.states.size()) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("odds enter the acceptance ratio") {
  // With x = (1, 8, 1, 1) on b = (1, 2, 2, 1): weights 1 and 8/2, so
  // P(0,1,2,0) = 4/5.
  const auto a = validate_matrix(two_way_independence_matrix(2, 2));
  const ModelSpec m(a, {1, 8, 1, 1});
  const auto z = z_value(m, SufficientStatistics({1, 2, 2, 1}));
  CHECK(conditional_probability(m, SufficientStatistics({1, 2, 2, 1}), CountVector({0, 1, 2, 0})) == Rational(4, 5));
  CHECK(z.value == 5);
  ChainConfig config;
  config.length = 100000;
  config.seed = 12;
  config.initial_table = CountVector({1, 0, 1, 1});
  const auto r = run_chain(m, config, basis_two_way(2, 2));
  std::size_t hits = 0;
  for (const auto& s : r.states) hits += s == CountVector({0, 1, 2, 0});
  CHECK(static_cast<double>(hits) / 100000.0 == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("single step reports acceptance") {
  const auto p = preset("indep-2x2", 1);
  RandomStream rng(1);
  bool accepted = true;
  // From (1,0,1,1) the move +-(1,-1,-1,1) either leaves N^4 or is taken.
  for (int k = 0; k < 20; ++k) {
    const auto next = metropolis_step(p.model, p.initial_table, *p.basis, rng, &accepted);
    CHECK(accepted == (next != p.initial_table));
  }
}
