#include "toric/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "toric/error.hpp"

namespace toric {

double chi_square(const CountVector& u, std::span<const double> expected) {
  if (u.size() != expected.size()) {
    throw Error(Errc::DimensionMismatch, "table has " + std::to_string(u.size()) + " cells, expected vector has " +
                                             std::to_string(expected.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (!(expected[j] > 0.0)) throw Error(Errc::NonPositiveExpected, "expected count of cell " + std::to_string(j) + " is not positive");
    const double diff = static_cast<double>(u[j]) - expected[j];
    sum += diff * diff / expected[j];
  }
  return sum;
}

double canonical_value(double v) {
  constexpr double scale = 1e9;
  static_assert(kChiSquareDecimals == 9);
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // fold -0
}

double EmpiricalDistribution::mass_at(double value) const {
  const double key = canonical_value(value);
  const auto it = std::lower_bound(support.begin(), support.end(), key);
  if (it == support.end() || *it != key) return 0.0;
  return masses[static_cast<std::size_t>(it - support.begin())];
}

namespace {

EmpiricalDistribution from_map(const std::map<double, double>& atoms, double total) {
  EmpiricalDistribution d;
  d.support.reserve(atoms.size());
  d.masses.reserve(atoms.size());
  for (const auto& [z, w] : atoms) {
    d.support.push_back(z);
    d.masses.push_back(w / total);
  }
  return d;
}

}  // namespace

EmpiricalDistribution empirical_distribution(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "no values to tabulate");
  std::map<double, double> counts;
  for (double v : values) counts[canonical_value(v)] += 1.0;
  return from_map(counts, static_cast<double>(values.size()));
}

EmpiricalDistribution distribution_from_masses(const std::vector<std::pair<double, double>>& atoms) {
  std::map<double, double> merged;
  double total = 0.0;
  for (const auto& [z, w] : atoms) {
    if (w < 0.0) throw Error(Errc::InvalidArgument, "negative probability mass");
    merged[canonical_value(z)] += w;
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "distribution has zero total mass");
  return from_map(merged, total);
}

EmpiricalDistribution exact_chi_square_distribution(const std::vector<CountVector>& tables,
                                                    const std::vector<Rational>& probabilities,
                                                    std::span<const double> expected) {
  if (tables.size() != probabilities.size()) {
    throw Error(Errc::DimensionMismatch, "one probability per table is required");
  }
  // Sum exactly per atom, convert once.
  std::map<double, Rational> exact;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    exact[canonical_value(chi_square(tables[k], expected))] += probabilities[k];
  }
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(exact.size());
  for (const auto& [z, p] : exact) atoms.emplace_back(z, p.get_d());
  return distribution_from_masses(atoms);
}

namespace {

template <class F>
double merge_walk(const EmpiricalDistribution& p, const EmpiricalDistribution& q, F term) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < p.size() || k < q.size()) {
    if (k == q.size() || (i < p.size() && p.support[i] < q.support[k])) {
      sum += term(p.masses[i++], 0.0);
    } else if (i == p.size() || q.support[k] < p.support[i]) {
      sum += term(0.0, q.masses[k++]);
    } else {
      sum += term(p.masses[i++], q.masses[k++]);
    }
  }
  return 0.5 * sum;
}

}  // namespace

double total_variation(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  return merge_walk(p, q, [](double a, double b) { return std::abs(a - b); });
}

double tv_squared(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  return merge_walk(p, q, [](double a, double b) { return (a - b) * (a - b); });
}

EssReport effective_sample_size(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(Errc::EmptyInput, "ESS needs at least two values");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = values[i] - mean;

  const auto autocov = [&](std::size_t lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += centered[i] * centered[i + lag];
    return c / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) throw Error(Errc::ConstantSequence, "ESS of a constant sequence is undefined");

  EssReport report;
  report.n = n;
  double sum = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double rho = autocov(t) / c0;
    if (rho < kEssCutoff) {
      report.censor_rho = rho;
      break;
    }
    report.autocorrelations.push_back(rho);
    sum += rho;
  }
  report.ess = static_cast<double>(n) / (1.0 + 2.0 * sum);
  return report;
}

}  // namespace toric
