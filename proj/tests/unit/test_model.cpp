#include <doctest.h>

#include <functional>
#include <numeric>
#include <random>

#include "toric/error.hpp"
#include "toric/model.hpp"
#include "toric/presets.hpp"
#include "toric/sampler.hpp"

using namespace toric;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no toric::Error thrown");
  return Errc::InvalidArgument;
}

const IntMatrix kTwoByTwo = two_way_independence_matrix(2, 2);

}  // namespace

TEST_CASE("2x2 independence matrix has the uniform degree functional") {
  const auto a = validate_matrix(kTwoByTwo);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 4);
  for (const auto& c : a.degree_functional()) CHECK(c == Rational(1, 2));
}

TEST_CASE("identity matrix has c = (1,1)") {
  const auto a = validate_matrix({{1, 0}, {0, 1}});
  CHECK(a.degree_functional() == std::vector<Rational>{1, 1});
}

TEST_CASE("matrix validation errors") {
  CHECK(code_of([] { validate_matrix({{1, 0}, {1, 0}}); }) == Errc::ZeroRowOrColumn);
  CHECK(code_of([] { validate_matrix({{1, 1}, {0, 0}}); }) == Errc::ZeroRowOrColumn);
  CHECK(code_of([] { validate_matrix({}); }) == Errc::EmptyMatrix);
  CHECK(code_of([] { validate_matrix({{}}); }) == Errc::EmptyMatrix);
  CHECK(code_of([] { validate_matrix({{1, 2}, {3}}); }) == Errc::DimensionMismatch);
  // (1,1) is not in the row span of (1,2).
  CHECK(code_of([] { validate_matrix({{1, 2}}); }) == Errc::OnesNotInRowspan);
}

TEST_CASE("certificate c^T A = 1 holds for every preset matrix") {
  for (const auto& rows : {two_way_independence_matrix(4, 5), quasi_independence_matrix(), no_three_way_matrix(),
                           IntMatrix{{1, 1, 1}, {0, 1, 2}}}) {
    const auto a = validate_matrix(rows);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Rational sum(0);
      for (std::size_t i = 0; i < a.rows(); ++i) sum += a.degree_functional()[i] * a(i, j);
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("degree functional is unchanged by column permutations") {
  const auto base = no_three_way_matrix();
  IntMatrix permuted = base;
  std::mt19937 gen(5);
  std::vector<std::size_t> perm(18);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = 0; j < 18; ++j) permuted[i][j] = base[i][perm[j]];
  }
  CHECK(validate_matrix(base).degree_functional() == validate_matrix(permuted).degree_functional());
}

TEST_CASE("sufficient statistics of the 2x2 example") {
  const auto a = validate_matrix(kTwoByTwo);
  CHECK(sufficient_statistics(a, CountVector({1, 0, 1, 1})) == SufficientStatistics({1, 2, 2, 1}));
  CHECK(sufficient_statistics(a, CountVector({0, 1, 2, 0})) == SufficientStatistics({1, 2, 2, 1}));
  CHECK(sufficient_statistics(a, CountVector::zeros(4)).is_zero());
  CHECK(code_of([&] { sufficient_statistics(a, CountVector({1, 2})); }) == Errc::DimensionMismatch);
}

TEST_CASE("degree") {
  const auto a = validate_matrix(kTwoByTwo);
  CHECK(degree(a, SufficientStatistics({1, 2, 2, 1})) == 3);
  CHECK(degree(a, SufficientStatistics({0, 0, 0, 0})) == 0);
  CHECK(code_of([&] { degree(a, SufficientStatistics({1, 2, 2, 2})); }) == Errc::NonIntegralDegree);
  CHECK(code_of([&] { degree(a, SufficientStatistics({1, 2})); }) == Errc::DimensionMismatch);
}

TEST_CASE("degree(A, Au) = |u| on random tables") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::int64_t> cell(0, 6);
  for (const auto& rows : {two_way_independence_matrix(4, 5), quasi_independence_matrix(), no_three_way_matrix()}) {
    const auto a = validate_matrix(rows);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::int64_t> u(a.cols());
      for (auto& v : u) v = cell(gen);
      const CountVector table(u);
      CHECK(degree(a, sufficient_statistics(a, table)) == table.total());
    }
  }
}

TEST_CASE("counts, odds and statistics validation") {
  CHECK(code_of([] { CountVector({1, -1}); }) == Errc::NegativeCount);
  CHECK(CountVector({2, 0, 3}).total() == 5);
  const auto a = validate_matrix(kTwoByTwo);
  CHECK(code_of([&] { ModelSpec(a, {1, 1, 1}); }) == Errc::DimensionMismatch);
  CHECK(code_of([&] { ModelSpec(a, {1, 0, 1, 1}); }) == Errc::NonPositiveOdds);
  CHECK(code_of([&] { ModelSpec(a, {1, Rational(-1, 2), 1, 1}); }) == Errc::NonPositiveOdds);
  const ModelSpec m(a, {1, 2, Rational(1, 3), 1});
  CHECK_FALSE(m.unit_odds());
  CHECK(m.odds_double()[2] == doctest::Approx(1.0 / 3.0));
  CHECK(ModelSpec::log_linear(a).unit_odds());
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("100/101") == Rational(100, 101));
  CHECK(parse_rational("200/104") == Rational(25, 13));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(code_of([] { parse_rational("abc"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_rational("1/0"); }) == Errc::ParseError);
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(factorial(10) == 3628800);
  CHECK(factorial(0) == 1);
}
