#pragma once

// Independent reference implementations. None of these share code with the
// library's fiber search or sampler; they trade speed for obviousness.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "toric/model.hpp"
#include "toric/rational.hpp"

namespace oracle {

using toric::ConfigurationMatrix;
using toric::CountVector;
using toric::Rational;
using toric::SufficientStatistics;

/// Every v in the box prod_j [0, ub_j] with A v = beta, in lexicographic
/// order. Requires a nonnegative matrix (ub_j from the rows that touch j).
inline std::vector<CountVector> grid_fiber(const ConfigurationMatrix& a, const SufficientStatistics& beta) {
  const std::size_t m = a.cols();
  std::vector<std::int64_t> ub(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t bound = INT64_MAX;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (a(i, j) > 0) bound = std::min(bound, beta[i] / a(i, j));
    }
    ub[j] = std::max<std::int64_t>(bound, -1);
  }
  std::vector<CountVector> out;
  if (std::any_of(ub.begin(), ub.end(), [](auto u) { return u < 0; })) return out;
  std::vector<std::int64_t> v(m, 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < a.rows() && ok; ++i) {
      std::int64_t sum = 0;
      for (std::size_t j = 0; j < m; ++j) sum += a(i, j) * v[j];
      ok = sum == beta[i];
    }
    if (ok) out.emplace_back(v);
    std::size_t k = m;
    while (k > 0) {
      --k;
      if (v[k] < ub[k]) {
        ++v[k];
        break;
      }
      v[k] = 0;
      if (k == 0) return out;
    }
    if (m == 0) return out;
  }
}

/// x^v / v! from scratch.
inline Rational weight(const std::vector<Rational>& x, const CountVector& v) {
  Rational w(1);
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::int64_t k = 1; k <= v[j]; ++k) w *= x[j] / Rational(k);
  }
  return w;
}

/// Z over the grid fiber.
inline Rational grid_z(const ConfigurationMatrix& a, const std::vector<Rational>& x, const SufficientStatistics& beta) {
  Rational z(0);
  for (const auto& v : grid_fiber(a, beta)) z += weight(x, v);
  return z;
}

/// Z through the homogeneity recursion deg(beta) Z(beta) = sum_j x_j Z(beta - a_j),
/// Z(0) = 1, Z = 0 off N^d. Needs a nonnegative matrix.
class RecursiveZ {
 public:
  RecursiveZ(const ConfigurationMatrix& a, std::vector<Rational> x) : a_(a), x_(std::move(x)) {}

  Rational operator()(const std::vector<std::int64_t>& beta) {
    if (std::any_of(beta.begin(), beta.end(), [](auto v) { return v < 0; })) return Rational(0);
    if (std::all_of(beta.begin(), beta.end(), [](auto v) { return v == 0; })) return Rational(1);
    if (auto it = memo_.find(beta); it != memo_.end()) return it->second;
    Rational deg(0);
    const auto& c = a_.degree_functional();
    for (std::size_t i = 0; i < beta.size(); ++i) deg += c[i] * Rational(static_cast<long>(beta[i]));
    Rational sum(0);
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      auto next = beta;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= a_(i, j);
      sum += x_[j] * (*this)(next);
    }
    Rational z = sum / deg;
    memo_.emplace(beta, z);
    return z;
  }

  /// x_j Z(beta - a_j) / Z(beta).
  std::vector<Rational> umvue(const std::vector<std::int64_t>& beta) {
    const Rational zb = (*this)(beta);
    std::vector<Rational> mu;
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      auto next = beta;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= a_(i, j);
      mu.push_back(x_[j] * (*this)(next) / zb);
    }
    return mu;
  }

 private:
  const ConfigurationMatrix& a_;
  std::vector<Rational> x_;
  std::map<std::vector<std::int64_t>, Rational> memo_;
};

/// Calls `visit` with every distinct ordering (j_1, ..., j_n) of the
/// multiset of cells given by `u`.
inline void for_each_ordering(const CountVector& u, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> picks;
  for (std::size_t j = 0; j < u.size(); ++j) {
    for (std::int64_t k = 0; k < u[j]; ++k) picks.push_back(j);
  }
  do {
    visit(picks);
  } while (std::next_permutation(picks.begin(), picks.end()));
}

}  // namespace oracle
