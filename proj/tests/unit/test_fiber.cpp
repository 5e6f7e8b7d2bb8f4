#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "toric/error.hpp"
#include "toric/fiber.hpp"
#include "toric/mle.hpp"
#include "toric/presets.hpp"
#include "toric/sampler.hpp"

using namespace toric;

namespace {

ModelSpec two_by_two() { return ModelSpec::log_linear(validate_matrix(two_way_independence_matrix(2, 2))); }

SufficientStatistics random_statistics(const ConfigurationMatrix& a, std::mt19937_64& gen, std::int64_t max_cell) {
  std::uniform_int_distribution<std::int64_t> cell(0, max_cell);
  std::vector<std::int64_t> u(a.cols());
  for (auto& v : u) v = cell(gen);
  return sufficient_statistics(a, CountVector(u));
}

}  // namespace

TEST_CASE("fiber of the 2x2 example, in search order") {
  const auto m = two_by_two();
  const auto fiber = enumerate_fiber(m.matrix(), SufficientStatistics({1, 2, 2, 1}));
  REQUIRE(fiber.size() == 2);
  CHECK(fiber[0] == CountVector({1, 0, 1, 1}));
  CHECK(fiber[1] == CountVector({0, 1, 2, 0}));
}

TEST_CASE("fiber of zero statistics is the zero table") {
  const auto m = two_by_two();
  const auto fiber = enumerate_fiber(m.matrix(), SufficientStatistics({0, 0, 0, 0}));
  REQUIRE(fiber.size() == 1);
  CHECK(fiber[0] == CountVector::zeros(4));
}

TEST_CASE("fiber agrees with the brute-force grid on random statistics") {
  std::mt19937_64 gen(2024);
  for (const auto& rows : {two_way_independence_matrix(2, 3), two_way_independence_matrix(3, 3),
                           quasi_independence_matrix()}) {
    const auto a = validate_matrix(rows);
    for (int trial = 0; trial < 15; ++trial) {
      const auto beta = random_statistics(a, gen, 2);
      auto fiber = enumerate_fiber(a, beta);
      auto grid = oracle::grid_fiber(a, beta);
      const std::set<CountVector> distinct(fiber.begin(), fiber.end());
      CHECK(distinct.size() == fiber.size());
      std::sort(fiber.begin(), fiber.end());
      CHECK(fiber == grid);
      for (const auto& v : fiber) CHECK(sufficient_statistics(a, v) == beta);
    }
  }
}

TEST_CASE("no-three-way fiber at s = 1 has 31 tables") {
  // [DERIVED] 1 table with chi-square 0, 18 with 8, 12 with 12.
  const auto p = preset("no3way-2x3x3", 1);
  CHECK(enumerate_fiber(p.model.matrix(), p.b).size() == 31);
}

TEST_CASE("A-hypergeometric polynomial and conditional probabilities") {
  const auto m = two_by_two();
  const SufficientStatistics b({1, 2, 2, 1});
  const auto z = z_value(m, b);
  CHECK(z.value == Rational(3, 2));
  CHECK(z.term_count == 2);
  CHECK(conditional_probability(m, b, CountVector({1, 0, 1, 1})) == Rational(2, 3));
  CHECK(conditional_probability(m, b, CountVector({0, 1, 2, 0})) == Rational(1, 3));

  CHECK_THROWS_AS(conditional_probability(m, b, CountVector({1, 1, 1, 1})), Error);
}

TEST_CASE("Z with odds matches the grid oracle and the recursion") {
  const auto a = validate_matrix(two_way_independence_matrix(3, 3));
  const std::vector<Rational> x{3, 2, 1, Rational(1, 2), 1, 1, 1, Rational(5, 3), 1};
  const ModelSpec m(a, x);
  oracle::RecursiveZ recursive(a, x);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto beta = random_statistics(a, gen, 2);
    const auto z = z_value(m, beta).value;
    CHECK(z == oracle::grid_z(a, x, beta));
    CHECK(z == recursive(beta.values()));
  }
}

TEST_CASE("statistics outside NA: empty fiber, Z = 0") {
  // Columns (1,0), (1,1), (1,3): (1,2) has degree 1 but no preimage.
  const auto a = validate_matrix({{1, 1, 1}, {0, 1, 3}});
  const auto m = ModelSpec::log_linear(a);
  const SufficientStatistics beta({1, 2});
  CHECK(degree(a, beta) == 1);
  CHECK(enumerate_fiber(a, beta).empty());
  CHECK_FALSE(in_semigroup(a, beta));
  CHECK(z_value(m, beta).value == 0);
  try {
    umvue(m, beta);
    FAIL("expected EmptyFiber");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyFiber);
  }
  CHECK(in_semigroup(a, SufficientStatistics({2, 4})));
}

TEST_CASE("fiber size cap") {
  const auto a = validate_matrix(two_way_independence_matrix(4, 5));
  FiberOptions small;
  small.max_elements = 10;
  try {
    enumerate_fiber(a, SufficientStatistics({5, 5, 5, 5, 4, 4, 4, 4, 4}), small);
    FAIL("expected FiberTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::FiberTooLarge);
  }
}

TEST_CASE("UMVUE of the 2x2 example") {
  // [DERIVED] Z(b - a_j) / Z(b) with Z(b) = 3/2.
  const auto mu = umvue(two_by_two(), SufficientStatistics({1, 2, 2, 1}));
  CHECK(mu == std::vector<Rational>{Rational(2, 3), Rational(1, 3), Rational(4, 3), Rational(2, 3)});
}

TEST_CASE("UMVUE: recursion oracle, estimating equations and homogeneity") {
  std::mt19937_64 gen(99);
  for (const auto& rows : {two_way_independence_matrix(2, 3), quasi_independence_matrix()}) {
    const auto a = validate_matrix(rows);
    const std::vector<Rational> x(a.cols(), Rational(1));
    const auto model = ModelSpec(a, x);
    oracle::RecursiveZ recursive(a, x);
    FiberOracle cached(model);
    for (int trial = 0; trial < 10; ++trial) {
      const auto beta = random_statistics(a, gen, 3);
      if (beta.is_zero()) continue;
      const auto mu = umvue(model, beta);
      CHECK(mu == recursive.umvue(beta.values()));
      CHECK(mu == cached.umvue(beta));
      Rational total(0);
      for (const auto& v : mu) total += v;
      CHECK(total == degree(a, beta));
      for (std::size_t i = 0; i < a.rows(); ++i) {
        Rational row(0);
        for (std::size_t j = 0; j < a.cols(); ++j) row += a(i, j) * mu[j];
        CHECK(row == beta[i]);
      }
      // Boundary: mu_j = 0 exactly when beta - a_j leaves NA.
      for (std::size_t j = 0; j < a.cols(); ++j) {
        CHECK((mu[j] == 0) == !cached.in_semigroup(subtract_column(a, beta, j)));
      }
    }
  }
}

TEST_CASE("quasi-independence closed form") {
  CHECK(quasi_independence_mu13(SufficientStatistics({2, 2, 1, 2, 1, 2})) == 1);
  CHECK(quasi_independence_mu13(SufficientStatistics({2, 2, 1, 2, 3, 0})) == 0);
  CHECK_THROWS_AS(quasi_independence_mu13(SufficientStatistics({0, 0, 1, 1, 0, 0})), Error);

  // [DERIVED] matches the fiber-oracle UMVUE exactly on random tables.
  const auto a = validate_matrix(quasi_independence_matrix());
  const auto model = ModelSpec::log_linear(a);
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto beta = random_statistics(a, gen, 3);
    if (beta[0] + beta[1] == 0) continue;
    CHECK(umvue(model, beta)[2] == quasi_independence_mu13(beta));
  }
}

TEST_CASE("oracle cache is shared across lookups") {
  FiberOracle oracle(two_by_two());
  const SufficientStatistics b({1, 2, 2, 1});
  CHECK(oracle.z(b) == Rational(3, 2));
  const auto before = oracle.cache_size();
  CHECK(oracle.z(b) == Rational(3, 2));
  CHECK(oracle.cache_size() == before);
}
