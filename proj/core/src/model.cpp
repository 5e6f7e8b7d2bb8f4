#include "toric/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toric/error.hpp"

namespace toric {

namespace {

// Gauss-Jordan over Q; free variables are set to zero. Empty result when
// the system is inconsistent.
std::vector<Rational> solve_rational(std::vector<std::vector<Rational>> lhs, std::vector<Rational> rhs) {
  const std::size_t eqs = lhs.size();
  const std::size_t vars = eqs == 0 ? 0 : lhs.front().size();
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < vars && rank < eqs; ++col) {
    std::size_t pivot = rank;
    while (pivot < eqs && lhs[pivot][col] == 0) ++pivot;
    if (pivot == eqs) continue;
    std::swap(lhs[pivot], lhs[rank]);
    std::swap(rhs[pivot], rhs[rank]);
    const Rational inv = 1 / lhs[rank][col];
    for (std::size_t k = col; k < vars; ++k) lhs[rank][k] *= inv;
    rhs[rank] *= inv;
    for (std::size_t r = 0; r < eqs; ++r) {
      if (r == rank || lhs[r][col] == 0) continue;
      const Rational factor = lhs[r][col];
      for (std::size_t k = col; k < vars; ++k) lhs[r][k] -= factor * lhs[rank][k];
      rhs[r] -= factor * rhs[rank];
    }
    pivot_cols.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < eqs; ++r) {
    if (rhs[r] != 0) return {};
  }
  std::vector<Rational> x(vars, Rational(0));
  for (std::size_t r = 0; r < rank; ++r) x[pivot_cols[r]] = rhs[r];
  return x;
}

// Minimum-norm solution of c^T A = 1: c = A w with (A^T A) w = 1. It lies in
// the column space of A, so it is unique and unchanged by column permutations.
std::vector<Rational> solve_degree_functional(std::size_t d, std::size_t m, const std::vector<std::int64_t>& entries) {
  std::vector<std::vector<Rational>> gram(m, std::vector<Rational>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j; k < m; ++k) {
      long dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += static_cast<long>(entries[i * m + j] * entries[i * m + k]);
      gram[j][k] = dot;
      gram[k][j] = dot;
    }
  }
  const auto w = solve_rational(std::move(gram), std::vector<Rational>(m, Rational(1)));
  if (w.empty()) return {};
  std::vector<Rational> c(d, Rational(0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (entries[i * m + j] != 0) c[i] += w[j] * static_cast<long>(entries[i * m + j]);
    }
  }
  return c;
}

}  // namespace

std::vector<std::int64_t> ConfigurationMatrix::column(std::size_t j) const {
  std::vector<std::int64_t> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

std::int64_t ConfigurationMatrix::column_sum(std::size_t j) const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j);
  return s;
}

IntMatrix ConfigurationMatrix::to_rows() const {
  IntMatrix out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

ConfigurationMatrix validate_matrix(const IntMatrix& entries) {
  if (entries.empty() || entries.front().empty()) throw Error(Errc::EmptyMatrix, "configuration matrix has no entries");
  const std::size_t d = entries.size();
  const std::size_t m = entries.front().size();

  ConfigurationMatrix a;
  a.rows_ = d;
  a.cols_ = m;
  a.entries_.reserve(d * m);
  for (std::size_t i = 0; i < d; ++i) {
    if (entries[i].size() != m) {
      throw Error(Errc::DimensionMismatch, "row " + std::to_string(i) + " has " + std::to_string(entries[i].size()) +
                                               " entries, expected " + std::to_string(m));
    }
    if (std::all_of(entries[i].begin(), entries[i].end(), [](std::int64_t v) { return v == 0; })) {
      throw Error(Errc::ZeroRowOrColumn, "row " + std::to_string(i) + " is zero");
    }
    for (std::int64_t v : entries[i]) {
      a.entries_.push_back(v);
      if (v < 0) a.nonnegative_ = false;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    bool zero = true;
    for (std::size_t i = 0; i < d && zero; ++i) zero = a(i, j) == 0;
    if (zero) throw Error(Errc::ZeroRowOrColumn, "column " + std::to_string(j) + " is zero");
  }

  a.degree_functional_ = solve_degree_functional(d, m, a.entries_);
  if (a.degree_functional_.empty()) throw Error(Errc::OnesNotInRowspan, "(1,...,1) is not in the row span");
  return a;
}

ModelSpec::ModelSpec(ConfigurationMatrix matrix, std::vector<Rational> odds)
    : matrix_(std::move(matrix)), odds_(std::move(odds)) {
  if (odds_.size() != matrix_.cols()) {
    throw Error(Errc::DimensionMismatch, "odds vector has " + std::to_string(odds_.size()) + " entries, expected " +
                                             std::to_string(matrix_.cols()));
  }
  odds_double_.reserve(odds_.size());
  log_odds_.reserve(odds_.size());
  for (const auto& x : odds_) {
    if (x <= 0) throw Error(Errc::NonPositiveOdds, "odds must be strictly positive, got " + to_string(x));
    if (x != 1) unit_odds_ = false;
    odds_double_.push_back(x.get_d());
    log_odds_.push_back(std::log(odds_double_.back()));
  }
}

ModelSpec ModelSpec::log_linear(ConfigurationMatrix matrix) {
  std::vector<Rational> ones(matrix.cols(), Rational(1));
  return ModelSpec(std::move(matrix), std::move(ones));
}

CountVector::CountVector(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
  for (std::int64_t v : counts_) {
    if (v < 0) throw Error(Errc::NegativeCount, "counts must be nonnegative");
    total_ += v;
  }
}

bool SufficientStatistics::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](std::int64_t v) { return v == 0; });
}

bool SufficientStatistics::nonnegative() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](std::int64_t v) { return v >= 0; });
}

std::size_t SufficientStatisticsHash::operator()(const SufficientStatistics& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t v : s.values()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

SufficientStatistics sufficient_statistics(const ConfigurationMatrix& a, const CountVector& u) {
  if (u.size() != a.cols()) {
    throw Error(Errc::DimensionMismatch, "table has " + std::to_string(u.size()) + " cells, matrix has " +
                                             std::to_string(a.cols()) + " columns");
  }
  std::vector<std::int64_t> b(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) b[i] += r[j] * u[j];
  }
  return SufficientStatistics(std::move(b));
}

SufficientStatistics subtract_column(const ConfigurationMatrix& a, const SufficientStatistics& beta, std::size_t j) {
  std::vector<std::int64_t> out(beta.values());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] -= a(i, j);
  return SufficientStatistics(std::move(out));
}

Rational degree_rational(const ConfigurationMatrix& a, const SufficientStatistics& beta) {
  if (beta.size() != a.rows()) {
    throw Error(Errc::DimensionMismatch, "statistics have " + std::to_string(beta.size()) + " entries, matrix has " +
                                             std::to_string(a.rows()) + " rows");
  }
  Rational n(0);
  const auto& c = a.degree_functional();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (beta[i] != 0 && c[i] != 0) n += c[i] * static_cast<long>(beta[i]);
  }
  return n;
}

std::int64_t degree(const ConfigurationMatrix& a, const SufficientStatistics& beta) {
  const Rational n = degree_rational(a, beta);
  if (n.get_den() != 1 || n < 0) {
    throw Error(Errc::NonIntegralDegree, "degree " + to_string(n) + " is not a nonnegative integer");
  }
  return n.get_num().get_si();
}

}  // namespace toric
