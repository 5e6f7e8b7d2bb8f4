#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "toric/model.hpp"
#include "toric/rational.hpp"

namespace toric {

struct FiberOptions {
  /// Enumeration stops with FiberTooLarge once this many elements are seen.
  std::size_t max_elements = 10'000'000;
};

/// All v in N^m with A v = beta, in the order produced by the depth-first
/// search (cells in column order, each cell tried from its upper bound down).
using Fiber = std::vector<CountVector>;

struct PolynomialValue {
  Rational value;
  std::size_t term_count = 0;
};

/// Calls `visit` for every fiber element; stops early when it returns false.
/// Returns the number of elements visited.
std::size_t for_each_fiber_element(const ConfigurationMatrix& a, const SufficientStatistics& beta,
                                   const std::function<bool(std::span<const std::int64_t>)>& visit,
                                   const FiberOptions& options = {});

Fiber enumerate_fiber(const ConfigurationMatrix& a, const SufficientStatistics& beta, const FiberOptions& options = {});

bool in_semigroup(const ConfigurationMatrix& a, const SufficientStatistics& beta, const FiberOptions& options = {});

/// x^v / v! as an exact rational.
Rational monomial_weight(const ModelSpec& model, std::span<const std::int64_t> v);

/// Z_A(beta; x) = sum over the fiber of x^v / v!; zero when beta is not in NA.
PolynomialValue z_value(const ModelSpec& model, const SufficientStatistics& beta, const FiberOptions& options = {});

/// x^u / (u! Z_A(beta; x)). Throws NotInFiber, EmptyFiber.
Rational conditional_probability(const ModelSpec& model, const SufficientStatistics& beta, const CountVector& u,
                                 const FiberOptions& options = {});

/// UMVUE of the expected counts, x_j Z(beta - a_j) / Z(beta). Throws EmptyFiber.
std::vector<Rational> umvue(const ModelSpec& model, const SufficientStatistics& beta, const FiberOptions& options = {});

/// Memoized Z_A values for one model. Safe for concurrent use: values are
/// computed outside the lock and published whole.
class FiberOracle {
 public:
  explicit FiberOracle(ModelSpec model, FiberOptions options = {});

  const ModelSpec& model() const noexcept { return model_; }

  Rational z(const SufficientStatistics& beta) const;
  std::vector<Rational> umvue(const SufficientStatistics& beta) const;
  bool in_semigroup(const SufficientStatistics& beta) const;

  std::size_t cache_size() const;

 private:
  ModelSpec model_;
  FiberOptions options_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<SufficientStatistics, Rational, SufficientStatisticsHash> z_cache_;
  mutable std::unordered_map<SufficientStatistics, bool, SufficientStatisticsHash> semigroup_cache_;
};

}  // namespace toric
