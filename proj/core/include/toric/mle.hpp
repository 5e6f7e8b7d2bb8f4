#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toric/model.hpp"
#include "toric/rational.hpp"

namespace toric {

// ---------------------------------------------------------------------------
// Closed-form rational MLEs

/// mu(j1, j2) = r_j1 * c_j2 / total, cells in row-major order.
/// Throws MarginalMismatch, ZeroTotal.
std::vector<Rational> two_way_independence_mle(std::span<const std::int64_t> row_sums,
                                               std::span<const std::int64_t> col_sums, std::int64_t total);

/// A decomposable graphical model given by a perfect sequence of cliques.
///
/// Cells are indexed lexicographically over the variables with the first
/// variable varying slowest. The statistics vector of the model is the
/// concatenation of the clique marginals in clique order, each marginal
/// indexed lexicographically over the clique's (sorted) variables.
class DecomposableStructure {
 public:
  struct Separator {
    std::vector<std::size_t> variables;  // empty: the grand total
    std::int64_t multiplicity = 1;       // nu(S)
  };

  /// Throws InvalidStructure when levels, cliques or separators are malformed.
  DecomposableStructure(std::vector<std::int64_t> levels, std::vector<std::vector<std::size_t>> cliques,
                        std::vector<Separator> separators);

  /// Independence of two variables: cliques {0},{1}, separator {} with nu 1.
  static DecomposableStructure two_way(std::int64_t rows, std::int64_t cols);

  const std::vector<std::int64_t>& levels() const noexcept { return levels_; }
  const std::vector<std::vector<std::size_t>>& cliques() const noexcept { return cliques_; }
  const std::vector<Separator>& separators() const noexcept { return separators_; }

  std::size_t cell_count() const noexcept { return cell_count_; }
  std::size_t clique_size(std::size_t c) const noexcept { return clique_sizes_[c]; }
  std::size_t separator_size(std::size_t s) const noexcept { return separator_sizes_[s]; }
  std::size_t statistics_length() const noexcept;

  /// Marginal index of `cell` within clique `c` / separator `s`.
  std::size_t clique_index(std::size_t c, std::size_t cell) const noexcept { return clique_maps_[c][cell]; }
  std::size_t separator_index(std::size_t s, std::size_t cell) const noexcept { return separator_maps_[s][cell]; }

  /// The 0/1 matrix mapping a table to its stacked clique marginals.
  IntMatrix configuration_matrix() const;

  /// Splits a stacked statistics vector into per-clique marginals.
  std::vector<std::vector<std::int64_t>> split(const SufficientStatistics& beta) const;

 private:
  std::vector<std::size_t> index_map(const std::vector<std::size_t>& variables, std::size_t& size) const;

  std::vector<std::int64_t> levels_;
  std::vector<std::vector<std::size_t>> cliques_;
  std::vector<Separator> separators_;
  std::size_t cell_count_ = 1;
  std::vector<std::size_t> clique_sizes_;
  std::vector<std::size_t> separator_sizes_;
  std::vector<std::vector<std::size_t>> clique_maps_;
  std::vector<std::vector<std::size_t>> separator_maps_;
};

/// prod_C u(j_C) / prod_S u(j_S)^nu(S) per cell, with 0/0 read as 0.
/// Throws InconsistentMarginals, ZeroSeparatorWithPositiveClique,
/// DimensionMismatch.
std::vector<Rational> decomposable_mle(const DecomposableStructure& structure,
                                       const std::vector<std::vector<std::int64_t>>& clique_marginals);

/// Closed-form expected count of cell (1,3) in the 3x3 quasi-independence
/// model with a structural zero at (3,3): u_1. (u_13 + u_23) / (u_1. + u_2.).
/// `b` is (u_1., u_2., u_31 + u_32, u_.1, u_.2, u_13 + u_23). Throws
/// ZeroDenominator, DimensionMismatch.
Rational quasi_independence_mu13(const SufficientStatistics& b);

// ---------------------------------------------------------------------------
// Generalized iterative proportional scaling

struct IpsConfig {
  double epsilon = 0.1;
  int max_iterations = 1000;

  void validate() const;
};

struct MleResult {
  std::vector<double> mu_hat;
  int iterations = 0;  // tau
  bool converged = false;
};

/// Generalized IPS (Darroch-Ratcliff) started from p = x / sum(x). Non-uniform
/// column sums are homogenized with one slack row. Cells touching a row with
/// beta_i = 0 are fixed at zero. A non-converged result is returned with
/// converged = false. Throws NegativeEntryInA, DimensionMismatch.
MleResult ips_solve(const ModelSpec& model, const SufficientStatistics& beta, std::int64_t total,
                    const IpsConfig& config);

/// sum_i |(A mu)_i - beta_i|.
double estimating_equation_residual(const ConfigurationMatrix& a, std::span<const double> mu,
                                    const SufficientStatistics& beta);

}  // namespace toric
