#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "toric/model.hpp"
#include "toric/rational.hpp"

namespace toric {

/// sum_j (u_j - e_j)^2 / e_j. Throws NonPositiveExpected, DimensionMismatch.
double chi_square(const CountVector& u, std::span<const double> expected);

/// Chi-square values are binned to this many decimals so that round-off
/// does not split atoms.
inline constexpr int kChiSquareDecimals = 9;
double canonical_value(double v);

/// Finite distribution over canonicalized values; support sorted ascending.
struct EmpiricalDistribution {
  std::vector<double> support;
  std::vector<double> masses;

  double mass_at(double value) const;
  std::size_t size() const noexcept { return support.size(); }
};

/// Relative frequencies of the canonicalized values. Throws EmptyInput.
EmpiricalDistribution empirical_distribution(std::span<const double> values);

/// Builds a distribution from (value, probability) pairs, e.g. an exact
/// reference. Masses of equal canonical values are merged. Throws
/// InvalidArgument on negative masses or a zero total.
EmpiricalDistribution distribution_from_masses(const std::vector<std::pair<double, double>>& atoms);

/// Exact chi-square distribution from a fiber and its conditional
/// probabilities.
EmpiricalDistribution exact_chi_square_distribution(const std::vector<CountVector>& tables,
                                                    const std::vector<Rational>& probabilities,
                                                    std::span<const double> expected);

/// 1/2 sum_z |p(z) - q(z)| over the union of the supports.
double total_variation(const EmpiricalDistribution& p, const EmpiricalDistribution& q);
/// 1/2 sum_z |p(z) - q(z)|^2, the literal squared variant.
double tv_squared(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

struct EssReport {
  std::size_t n = 0;
  std::vector<double> autocorrelations;  // rho_1, ..., rho_T (the lags summed)
  double censor_rho = 0.0;               // the first rho below the cutoff (0 if never)
  double ess = 0.0;
};

inline constexpr double kEssCutoff = 0.01;

/// N / (1 + 2 sum_{t>=1} rho_t), summing lags until the first rho_t < 0.01.
/// rho_t = c_t / c_0 with the biased autocovariance c_t. Throws
/// ConstantSequence, EmptyInput (fewer than 2 values).
EssReport effective_sample_size(std::span<const double> values);

}  // namespace toric
