#include "toric/mle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "toric/error.hpp"

namespace toric {

std::vector<Rational> two_way_independence_mle(std::span<const std::int64_t> row_sums,
                                               std::span<const std::int64_t> col_sums, std::int64_t total) {
  const auto negative = [](std::int64_t v) { return v < 0; };
  if (std::any_of(row_sums.begin(), row_sums.end(), negative) ||
      std::any_of(col_sums.begin(), col_sums.end(), negative)) {
    throw Error(Errc::MarginalMismatch, "marginal counts must be nonnegative");
  }
  const std::int64_t rows_total = std::accumulate(row_sums.begin(), row_sums.end(), std::int64_t{0});
  const std::int64_t cols_total = std::accumulate(col_sums.begin(), col_sums.end(), std::int64_t{0});
  if (rows_total != total || cols_total != total) {
    throw Error(Errc::MarginalMismatch, "row sums " + std::to_string(rows_total) + ", column sums " +
                                            std::to_string(cols_total) + ", total " + std::to_string(total));
  }
  if (total == 0) throw Error(Errc::ZeroTotal, "two-way MLE needs a positive total");

  std::vector<Rational> mu;
  mu.reserve(row_sums.size() * col_sums.size());
  for (std::int64_t r : row_sums) {
    for (std::int64_t c : col_sums) mu.push_back(make_rational(r * c, total));
  }
  return mu;
}

// ---------------------------------------------------------------------------

DecomposableStructure::DecomposableStructure(std::vector<std::int64_t> levels,
                                             std::vector<std::vector<std::size_t>> cliques,
                                             std::vector<Separator> separators)
    : levels_(std::move(levels)), cliques_(std::move(cliques)), separators_(std::move(separators)) {
  if (levels_.empty()) throw Error(Errc::InvalidStructure, "no variables");
  for (std::int64_t l : levels_) {
    if (l < 1) throw Error(Errc::InvalidStructure, "every variable needs at least one level");
    cell_count_ *= static_cast<std::size_t>(l);
  }
  if (cliques_.empty()) throw Error(Errc::InvalidStructure, "no cliques");

  const auto normalize = [this](std::vector<std::size_t>& vars, bool allow_empty) {
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
      throw Error(Errc::InvalidStructure, "repeated variable in a clique or separator");
    }
    if (!allow_empty && vars.empty()) throw Error(Errc::InvalidStructure, "empty clique");
    for (std::size_t v : vars) {
      if (v >= levels_.size()) throw Error(Errc::InvalidStructure, "variable index out of range");
    }
  };

  std::vector<char> covered(levels_.size(), 0);
  for (auto& clique : cliques_) {
    normalize(clique, false);
    for (std::size_t v : clique) covered[v] = 1;
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw Error(Errc::InvalidStructure, "every variable must belong to a clique");
  }
  for (auto& sep : separators_) {
    normalize(sep.variables, true);
    if (sep.multiplicity < 1) throw Error(Errc::InvalidStructure, "separator multiplicity must be at least 1");
    const bool contained = std::any_of(cliques_.begin(), cliques_.end(), [&](const auto& clique) {
      return std::includes(clique.begin(), clique.end(), sep.variables.begin(), sep.variables.end());
    });
    if (!contained) throw Error(Errc::InvalidStructure, "separator is not contained in any clique");
  }

  for (const auto& clique : cliques_) {
    std::size_t size = 0;
    clique_maps_.push_back(index_map(clique, size));
    clique_sizes_.push_back(size);
  }
  for (const auto& sep : separators_) {
    std::size_t size = 0;
    separator_maps_.push_back(index_map(sep.variables, size));
    separator_sizes_.push_back(size);
  }
}

DecomposableStructure DecomposableStructure::two_way(std::int64_t rows, std::int64_t cols) {
  return DecomposableStructure({rows, cols}, {{0}, {1}}, {Separator{{}, 1}});
}

std::size_t DecomposableStructure::statistics_length() const noexcept {
  return std::accumulate(clique_sizes_.begin(), clique_sizes_.end(), std::size_t{0});
}

std::vector<std::size_t> DecomposableStructure::index_map(const std::vector<std::size_t>& variables,
                                                          std::size_t& size) const {
  size = 1;
  for (std::size_t v : variables) size *= static_cast<std::size_t>(levels_[v]);

  std::vector<std::size_t> map(cell_count_);
  std::vector<std::int64_t> digits(levels_.size(), 0);
  for (std::size_t cell = 0; cell < cell_count_; ++cell) {
    std::size_t index = 0;
    for (std::size_t v : variables) index = index * static_cast<std::size_t>(levels_[v]) + digits[v];
    map[cell] = index;
    for (std::size_t k = levels_.size(); k-- > 0;) {
      if (++digits[k] < levels_[k]) break;
      digits[k] = 0;
    }
  }
  return map;
}

IntMatrix DecomposableStructure::configuration_matrix() const {
  IntMatrix a;
  for (std::size_t c = 0; c < cliques_.size(); ++c) {
    const std::size_t offset = a.size();
    a.resize(offset + clique_sizes_[c], std::vector<std::int64_t>(cell_count_, 0));
    for (std::size_t cell = 0; cell < cell_count_; ++cell) a[offset + clique_maps_[c][cell]][cell] = 1;
  }
  return a;
}

std::vector<std::vector<std::int64_t>> DecomposableStructure::split(const SufficientStatistics& beta) const {
  if (beta.size() != statistics_length()) {
    throw Error(Errc::DimensionMismatch, "statistics length " + std::to_string(beta.size()) + " does not match " +
                                             std::to_string(statistics_length()) + " clique cells");
  }
  std::vector<std::vector<std::int64_t>> out;
  std::size_t offset = 0;
  for (std::size_t size : clique_sizes_) {
    out.emplace_back(beta.values().begin() + static_cast<std::ptrdiff_t>(offset),
                     beta.values().begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return out;
}

std::vector<Rational> decomposable_mle(const DecomposableStructure& structure,
                                       const std::vector<std::vector<std::int64_t>>& clique_marginals) {
  const auto& cliques = structure.cliques();
  if (clique_marginals.size() != cliques.size()) {
    throw Error(Errc::DimensionMismatch, "expected one marginal table per clique");
  }
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    if (clique_marginals[c].size() != structure.clique_size(c)) {
      throw Error(Errc::DimensionMismatch, "clique " + std::to_string(c) + " marginal has the wrong size");
    }
    for (std::int64_t v : clique_marginals[c]) {
      if (v < 0) throw Error(Errc::InconsistentMarginals, "marginal counts must be nonnegative");
    }
  }

  const std::int64_t total =
      std::accumulate(clique_marginals[0].begin(), clique_marginals[0].end(), std::int64_t{0});
  for (const auto& marginal : clique_marginals) {
    if (std::accumulate(marginal.begin(), marginal.end(), std::int64_t{0}) != total) {
      throw Error(Errc::InconsistentMarginals, "clique marginals have different totals");
    }
  }

  // Separator marginals, derived from every clique that contains the separator.
  const auto& separators = structure.separators();
  std::vector<std::vector<std::int64_t>> separator_marginals;
  for (std::size_t s = 0; s < separators.size(); ++s) {
    std::vector<std::int64_t> reference;
    for (std::size_t c = 0; c < cliques.size(); ++c) {
      const auto& vars = separators[s].variables;
      if (!std::includes(cliques[c].begin(), cliques[c].end(), vars.begin(), vars.end())) continue;
      std::vector<std::int64_t> marginal(structure.separator_size(s), 0);
      std::vector<char> seen(structure.clique_size(c), 0);
      for (std::size_t cell = 0; cell < structure.cell_count(); ++cell) {
        const std::size_t ci = structure.clique_index(c, cell);
        if (seen[ci]) continue;
        seen[ci] = 1;
        marginal[structure.separator_index(s, cell)] += clique_marginals[c][ci];
      }
      if (reference.empty()) {
        reference = std::move(marginal);
      } else if (reference != marginal) {
        throw Error(Errc::InconsistentMarginals,
                    "cliques disagree on the marginal of separator " + std::to_string(s));
      }
    }
    separator_marginals.push_back(std::move(reference));
  }

  std::vector<Rational> mu(structure.cell_count());
  for (std::size_t cell = 0; cell < structure.cell_count(); ++cell) {
    Integer numerator(1);
    for (std::size_t c = 0; c < cliques.size() && numerator != 0; ++c) {
      numerator *= static_cast<long>(clique_marginals[c][structure.clique_index(c, cell)]);
    }
    if (numerator == 0) {
      mu[cell] = 0;
      continue;
    }
    Integer denominator(1);
    for (std::size_t s = 0; s < separators.size(); ++s) {
      Integer power;
      const Integer base(static_cast<long>(separator_marginals[s][structure.separator_index(s, cell)]));
      mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(separators[s].multiplicity));
      denominator *= power;
    }
    if (denominator == 0) {
      throw Error(Errc::ZeroSeparatorWithPositiveClique, "zero separator marginal under a positive clique marginal");
    }
    mu[cell] = Rational(numerator, denominator);
    mu[cell].canonicalize();
  }
  return mu;
}

Rational quasi_independence_mu13(const SufficientStatistics& b) {
  if (b.size() != 6) throw Error(Errc::DimensionMismatch, "quasi-independence statistics have 6 entries");
  const std::int64_t denominator = b[0] + b[1];
  if (denominator == 0) throw Error(Errc::ZeroDenominator, "u_1. + u_2. is zero");
  return make_rational(b[0] * b[5], denominator);
}

// ---------------------------------------------------------------------------

void IpsConfig::validate() const {
  if (!(epsilon > 0)) throw Error(Errc::InvalidArgument, "IPS epsilon must be positive");
  if (max_iterations < 1) throw Error(Errc::InvalidArgument, "IPS max_iterations must be at least 1");
}

double estimating_equation_residual(const ConfigurationMatrix& a, std::span<const double> mu,
                                    const SufficientStatistics& beta) {
  double residual = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double fitted = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) fitted += static_cast<double>(row[j]) * mu[j];
    residual += std::abs(fitted - static_cast<double>(beta[i]));
  }
  return residual;
}

MleResult ips_solve(const ModelSpec& model, const SufficientStatistics& beta, std::int64_t total,
                    const IpsConfig& config) {
  config.validate();
  const auto& a = model.matrix();
  if (!a.nonnegative()) throw Error(Errc::NegativeEntryInA, "generalized IPS needs a nonnegative matrix");
  if (beta.size() != a.rows()) throw Error(Errc::DimensionMismatch, "statistics length does not match the matrix");
  if (total <= 0) throw Error(Errc::InvalidArgument, "IPS needs a positive total count");

  const std::size_t d = a.rows();
  const std::size_t m = a.cols();

  // Working system: A plus an optional slack row so every column sums to s.
  std::int64_t s = 0;
  for (std::size_t j = 0; j < m; ++j) s = std::max(s, a.column_sum(j));
  bool uniform = true;
  for (std::size_t j = 0; j < m; ++j) uniform = uniform && a.column_sum(j) == s;

  std::vector<std::vector<std::int64_t>> rows(a.to_rows());
  std::vector<double> targets(d);
  for (std::size_t i = 0; i < d; ++i) targets[i] = static_cast<double>(beta[i]);
  if (!uniform) {
    std::vector<std::int64_t> slack(m);
    for (std::size_t j = 0; j < m; ++j) slack[j] = s - a.column_sum(j);
    std::int64_t slack_target = s * total;
    for (std::size_t i = 0; i < d; ++i) slack_target -= beta[i];
    rows.push_back(std::move(slack));
    targets.push_back(static_cast<double>(slack_target));
  }
  const std::size_t rows_used = rows.size();

  // Sparse column view, and cells forced to zero by a vanishing statistic.
  std::vector<std::vector<std::pair<std::size_t, double>>> column_entries(m);
  std::vector<char> active(m, 1);
  for (std::size_t i = 0; i < rows_used; ++i) {
    if (targets[i] < 0) return {std::vector<double>(m, 0.0), 0, false};
    for (std::size_t j = 0; j < m; ++j) {
      if (rows[i][j] == 0) continue;
      column_entries[j].emplace_back(i, static_cast<double>(rows[i][j]));
      if (targets[i] == 0) active[j] = 0;
    }
  }
  // A positive statistic with no live cell cannot be fitted.
  for (std::size_t i = 0; i < rows_used; ++i) {
    if (targets[i] == 0) continue;
    bool reachable = false;
    for (std::size_t j = 0; j < m && !reachable; ++j) reachable = active[j] && rows[i][j] > 0;
    if (!reachable) return {std::vector<double>(m, 0.0), 0, false};
  }

  const auto& x = model.odds_double();
  std::vector<double> p(m, 0.0);
  double odds_total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (active[j]) odds_total += x[j];
  }
  for (std::size_t j = 0; j < m; ++j) p[j] = active[j] ? x[j] / odds_total : 0.0;

  const double n = static_cast<double>(total);
  const double inv_s = 1.0 / static_cast<double>(s);
  const double tolerance = config.epsilon * static_cast<double>(d);
  std::vector<double> fitted(rows_used);
  std::vector<double> log_ratio(rows_used);

  const auto fit = [&] {
    std::fill(fitted.begin(), fitted.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (p[j] == 0.0) continue;
      for (const auto& [i, aij] : column_entries[j]) fitted[i] += aij * p[j];
    }
  };

  MleResult result;
  result.mu_hat.assign(m, 0.0);
  for (int t = 1; t <= config.max_iterations; ++t) {
    fit();
    for (std::size_t i = 0; i < rows_used; ++i) {
      log_ratio[i] = targets[i] > 0 ? std::log(targets[i] / (n * fitted[i])) : 0.0;
    }
    double mass = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j]) continue;
      double exponent = 0.0;
      for (const auto& [i, aij] : column_entries[j]) exponent += aij * log_ratio[i];
      p[j] *= std::exp(exponent * inv_s);
      mass += p[j];
    }
    // Column sums are uniform, so the update is scale invariant and
    // renormalizing only removes drift in the total mass.
    for (double& value : p) value /= mass;

    fit();
    double error = 0.0;
    for (std::size_t i = 0; i < d; ++i) error += std::abs(n * fitted[i] - targets[i]);
    result.iterations = t;
    if (error < tolerance) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t j = 0; j < m; ++j) result.mu_hat[j] = n * p[j];
  return result;
}

}  // namespace toric
