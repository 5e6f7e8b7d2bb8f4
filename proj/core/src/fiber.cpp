#include "toric/fiber.hpp"

#include <algorithm>
#include <string>

#include "toric/error.hpp"

namespace toric {

namespace {

class FiberSearch {
 public:
  FiberSearch(const ConfigurationMatrix& a, const SufficientStatistics& beta, std::int64_t total,
              const std::function<bool(std::span<const std::int64_t>)>& visit, const FiberOptions& options)
      : a_(a), visit_(visit), options_(options), d_(a.rows()), m_(a.cols()),
        residual_(beta.values()), remaining_(total), v_(m_, 0),
        suffix_pos_((m_ + 1) * d_, 0), suffix_neg_((m_ + 1) * d_, 0) {
    for (std::size_t j = m_; j-- > 0;) {
      for (std::size_t i = 0; i < d_; ++i) {
        suffix_pos_[j * d_ + i] = suffix_pos_[(j + 1) * d_ + i] || a_(i, j) > 0;
        suffix_neg_[j * d_ + i] = suffix_neg_[(j + 1) * d_ + i] || a_(i, j) < 0;
      }
    }
  }

  std::size_t run() {
    if (feasible(0)) descend(0);
    return visited_;
  }

 private:
  // Residual can still be driven to zero by cells j.. onwards.
  bool feasible(std::size_t j) const {
    for (std::size_t i = 0; i < d_; ++i) {
      const std::int64_t r = residual_[i];
      if (r < 0 && !suffix_neg_[j * d_ + i]) return false;
      if (r > 0 && !suffix_pos_[j * d_ + i]) return false;
    }
    return true;
  }

  void apply(std::size_t j, std::int64_t amount) {
    for (std::size_t i = 0; i < d_; ++i) residual_[i] -= a_(i, j) * amount;
    remaining_ -= amount;
    v_[j] += amount;
  }

  void descend(std::size_t j) {
    if (stop_) return;
    if (j + 1 == m_) {
      // The total is fixed by the degree, so the last cell is forced.
      const std::int64_t last = remaining_;
      for (std::size_t i = 0; i < d_; ++i) {
        if (residual_[i] != a_(i, j) * last) return;
      }
      v_[j] = last;
      if (++visited_ > options_.max_elements) {
        throw Error(Errc::FiberTooLarge, "fiber exceeds " + std::to_string(options_.max_elements) + " elements");
      }
      if (!visit_(v_)) stop_ = true;
      v_[j] = 0;
      return;
    }

    std::int64_t upper = remaining_;
    for (std::size_t i = 0; i < d_; ++i) {
      const std::int64_t aij = a_(i, j);
      if (aij > 0 && !suffix_neg_[(j + 1) * d_ + i]) upper = std::min(upper, residual_[i] / aij);
    }
    if (upper < 0) return;

    apply(j, upper);
    for (std::int64_t value = upper;; --value) {
      if (feasible(j + 1)) descend(j + 1);
      if (stop_ || value == 0) break;
      apply(j, -1);
    }
    apply(j, -v_[j]);
  }

  const ConfigurationMatrix& a_;
  const std::function<bool(std::span<const std::int64_t>)>& visit_;
  const FiberOptions& options_;
  std::size_t d_;
  std::size_t m_;
  std::vector<std::int64_t> residual_;
  std::int64_t remaining_;
  std::vector<std::int64_t> v_;
  std::vector<char> suffix_pos_;
  std::vector<char> suffix_neg_;
  std::size_t visited_ = 0;
  bool stop_ = false;
};

// Integer pieces of the odds: x_j = num_j / den_j.
struct OddsParts {
  std::vector<Integer> num;
  std::vector<Integer> den;
  bool unit = true;
};

OddsParts odds_parts(const ModelSpec& model) {
  OddsParts parts;
  for (const auto& x : model.odds()) {
    parts.num.push_back(x.get_num());
    parts.den.push_back(x.get_den());
  }
  parts.unit = model.unit_odds();
  return parts;
}

}  // namespace

std::size_t for_each_fiber_element(const ConfigurationMatrix& a, const SufficientStatistics& beta,
                                   const std::function<bool(std::span<const std::int64_t>)>& visit,
                                   const FiberOptions& options) {
  const Rational n = degree_rational(a, beta);
  if (n.get_den() != 1 || n < 0) return 0;
  FiberSearch search(a, beta, n.get_num().get_si(), visit, options);
  return search.run();
}

Fiber enumerate_fiber(const ConfigurationMatrix& a, const SufficientStatistics& beta, const FiberOptions& options) {
  Fiber out;
  for_each_fiber_element(
      a, beta,
      [&out](std::span<const std::int64_t> v) {
        out.emplace_back(std::vector<std::int64_t>(v.begin(), v.end()));
        return true;
      },
      options);
  return out;
}

bool in_semigroup(const ConfigurationMatrix& a, const SufficientStatistics& beta, const FiberOptions& options) {
  return for_each_fiber_element(a, beta, [](std::span<const std::int64_t>) { return false; }, options) > 0;
}

Rational monomial_weight(const ModelSpec& model, std::span<const std::int64_t> v) {
  Integer num(1);
  Integer den(1);
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] == 0) continue;
    den *= factorial(v[j]);
    if (model.odds()[j] != 1) {
      Integer p;
      Integer q;
      mpz_pow_ui(p.get_mpz_t(), model.odds()[j].get_num_mpz_t(), static_cast<unsigned long>(v[j]));
      mpz_pow_ui(q.get_mpz_t(), model.odds()[j].get_den_mpz_t(), static_cast<unsigned long>(v[j]));
      num *= p;
      den *= q;
    }
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

PolynomialValue z_value(const ModelSpec& model, const SufficientStatistics& beta, const FiberOptions& options) {
  const auto& a = model.matrix();
  const Rational degree_q = degree_rational(a, beta);
  if (degree_q.get_den() != 1 || degree_q < 0) return {Rational(0), 0};
  const auto n = static_cast<unsigned long>(degree_q.get_num().get_si());

  // Sum the integers n!/v! * prod num_j^v_j den_j^(n - v_j) and divide once by
  // n! * prod den_j^n at the end.
  const OddsParts odds = odds_parts(model);
  const Integer& n_factorial = factorial(static_cast<std::int64_t>(n));
  Integer sum(0);
  Integer term;
  Integer power;
  const std::size_t terms = for_each_fiber_element(
      a, beta,
      [&](std::span<const std::int64_t> v) {
        term = n_factorial;
        for (std::size_t j = 0; j < v.size(); ++j) {
          if (v[j] > 1) term /= factorial(v[j]);
        }
        if (!odds.unit) {
          for (std::size_t j = 0; j < v.size(); ++j) {
            if (odds.num[j] == 1 && odds.den[j] == 1) continue;
            mpz_pow_ui(power.get_mpz_t(), odds.num[j].get_mpz_t(), static_cast<unsigned long>(v[j]));
            term *= power;
            mpz_pow_ui(power.get_mpz_t(), odds.den[j].get_mpz_t(), n - static_cast<unsigned long>(v[j]));
            term *= power;
          }
        }
        sum += term;
        return true;
      },
      options);

  Integer denominator = n_factorial;
  if (!odds.unit) {
    for (std::size_t j = 0; j < odds.den.size(); ++j) {
      if (odds.den[j] == 1) continue;
      mpz_pow_ui(power.get_mpz_t(), odds.den[j].get_mpz_t(), n);
      denominator *= power;
    }
  }
  Rational value(sum, denominator);
  value.canonicalize();
  return {value, terms};
}

Rational conditional_probability(const ModelSpec& model, const SufficientStatistics& beta, const CountVector& u,
                                 const FiberOptions& options) {
  if (sufficient_statistics(model.matrix(), u) != beta) {
    throw Error(Errc::NotInFiber, "A u does not equal the conditioning statistics");
  }
  const PolynomialValue z = z_value(model, beta, options);
  if (z.value == 0) throw Error(Errc::EmptyFiber, "fiber is empty");
  return monomial_weight(model, u.counts()) / z.value;
}

std::vector<Rational> umvue(const ModelSpec& model, const SufficientStatistics& beta, const FiberOptions& options) {
  return FiberOracle(model, options).umvue(beta);
}

FiberOracle::FiberOracle(ModelSpec model, FiberOptions options) : model_(std::move(model)), options_(options) {}

Rational FiberOracle::z(const SufficientStatistics& beta) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = z_cache_.find(beta); it != z_cache_.end()) return it->second;
  }
  Rational value = z_value(model_, beta, options_).value;
  std::lock_guard lock(mutex_);
  return z_cache_.emplace(beta, std::move(value)).first->second;
}

std::vector<Rational> FiberOracle::umvue(const SufficientStatistics& beta) const {
  const auto& a = model_.matrix();
  if (beta.size() != a.rows()) throw Error(Errc::DimensionMismatch, "statistics length does not match the matrix");
  const Rational total = z(beta);
  if (total == 0) throw Error(Errc::EmptyFiber, "statistics are not in the semigroup NA");
  std::vector<Rational> mu(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const SufficientStatistics reduced = subtract_column(a, beta, j);
    if (a.nonnegative() && !reduced.nonnegative()) {
      mu[j] = 0;
      continue;
    }
    mu[j] = model_.odds()[j] * z(reduced) / total;
  }
  return mu;
}

bool FiberOracle::in_semigroup(const SufficientStatistics& beta) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = semigroup_cache_.find(beta); it != semigroup_cache_.end()) return it->second;
    if (auto it = z_cache_.find(beta); it != z_cache_.end()) return it->second != 0;
  }
  const bool member = toric::in_semigroup(model_.matrix(), beta, options_);
  std::lock_guard lock(mutex_);
  semigroup_cache_.emplace(beta, member);
  return member;
}

std::size_t FiberOracle::cache_size() const {
  std::lock_guard lock(mutex_);
  return z_cache_.size();
}

}  // namespace toric
