#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "toric/rational.hpp"

namespace toric {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Integer d x m configuration matrix with no zero row or column and
/// (1,...,1) in its row span. The row-span certificate is a rational
/// vector c with c^T A = (1,...,1), kept for exact degree evaluation.
class ConfigurationMatrix {
 public:
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::int64_t operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }
  std::span<const std::int64_t> row(std::size_t i) const noexcept {
    return {entries_.data() + i * cols_, cols_};
  }
  std::vector<std::int64_t> column(std::size_t j) const;
  std::int64_t column_sum(std::size_t j) const;

  IntMatrix to_rows() const;

  const std::vector<Rational>& degree_functional() const noexcept { return degree_functional_; }
  bool nonnegative() const noexcept { return nonnegative_; }

  friend bool operator==(const ConfigurationMatrix& a, const ConfigurationMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  friend ConfigurationMatrix validate_matrix(const IntMatrix& entries);
  ConfigurationMatrix() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> entries_;  // row-major
  std::vector<Rational> degree_functional_;
  bool nonnegative_ = true;
};

/// Throws EmptyMatrix, ZeroRowOrColumn, DimensionMismatch (ragged rows) or
/// OnesNotInRowspan.
ConfigurationMatrix validate_matrix(const IntMatrix& entries);

/// Configuration matrix together with positive odds x (x = 1: log-linear).
class ModelSpec {
 public:
  ModelSpec(ConfigurationMatrix matrix, std::vector<Rational> odds);
  static ModelSpec log_linear(ConfigurationMatrix matrix);

  const ConfigurationMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<Rational>& odds() const noexcept { return odds_; }
  const std::vector<double>& odds_double() const noexcept { return odds_double_; }
  const std::vector<double>& log_odds() const noexcept { return log_odds_; }
  bool unit_odds() const noexcept { return unit_odds_; }

 private:
  ConfigurationMatrix matrix_;
  std::vector<Rational> odds_;
  std::vector<double> odds_double_;
  std::vector<double> log_odds_;
  bool unit_odds_ = true;
};

/// A table u in N^m; the total |u| is cached.
class CountVector {
 public:
  CountVector() = default;
  explicit CountVector(std::vector<std::int64_t> counts);
  static CountVector zeros(std::size_t m) { return CountVector(std::vector<std::int64_t>(m, 0)); }

  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t total() const noexcept { return total_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::int64_t operator[](std::size_t j) const noexcept { return counts_[j]; }

  friend bool operator==(const CountVector&, const CountVector&) = default;
  friend auto operator<=>(const CountVector& a, const CountVector& b) { return a.counts_ <=> b.counts_; }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Sufficient statistics b (or an intermediate state beta) in Z^d.
class SufficientStatistics {
 public:
  SufficientStatistics() = default;
  explicit SufficientStatistics(std::vector<std::int64_t> values) : values_(std::move(values)) {}

  const std::vector<std::int64_t>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::int64_t operator[](std::size_t i) const noexcept { return values_[i]; }
  bool is_zero() const noexcept;
  bool nonnegative() const noexcept;

  friend bool operator==(const SufficientStatistics&, const SufficientStatistics&) = default;
  friend auto operator<=>(const SufficientStatistics& a, const SufficientStatistics& b) {
    return a.values_ <=> b.values_;
  }

 private:
  std::vector<std::int64_t> values_;
};

struct SufficientStatisticsHash {
  std::size_t operator()(const SufficientStatistics& s) const noexcept;
};

/// b = A u. Throws DimensionMismatch.
SufficientStatistics sufficient_statistics(const ConfigurationMatrix& a, const CountVector& u);

/// beta - a_j (may leave N^d).
SufficientStatistics subtract_column(const ConfigurationMatrix& a, const SufficientStatistics& beta, std::size_t j);

/// sum_i c_i beta_i as an exact rational.
Rational degree_rational(const ConfigurationMatrix& a, const SufficientStatistics& beta);

/// sum_i c_i beta_i; throws NonIntegralDegree unless it is a nonnegative
/// integer, DimensionMismatch on length mismatch.
std::int64_t degree(const ConfigurationMatrix& a, const SufficientStatistics& beta);

}  // namespace toric
