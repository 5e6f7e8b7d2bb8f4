#include "toric/sampler.hpp"

#include <exception>
#include <numeric>
#include <thread>

#include "toric/error.hpp"
#include "toric/rng.hpp"

namespace toric {

namespace {

constexpr std::size_t kMaxCachedStates = std::size_t{1} << 17;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_remaining(const ConfigurationMatrix& a, const SufficientStatistics& beta, std::int64_t remaining) {
  if (remaining < 1) throw Error(Errc::InvalidArgument, "a step needs at least one remaining count");
  if (degree_rational(a, beta) != remaining) {
    throw Error(Errc::InvalidArgument, "remaining count " + std::to_string(remaining) + " is not deg(beta) = " +
                                           to_string(degree_rational(a, beta)));
  }
}

// Inverse CDF with a single uniform variate; zero-probability cells are
// never chosen.
std::size_t pick_cell(const std::vector<double>& probabilities, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = probabilities.size();
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] <= 0.0) continue;
    cumulative += probabilities[j];
    last_positive = j;
    if (u < cumulative) return j;
  }
  return last_positive;
}

}  // namespace

std::string estimator_name(const EstimatorKind& kind) {
  return std::visit(overloaded{[](const ExactUmvue&) { return std::string("exact"); },
                               [](const TwoWayRational&) { return std::string("rational"); },
                               [](const Decomposable&) { return std::string("decomposable"); },
                               [](const Ips&) { return std::string("ips"); }},
                    kind);
}

IntMatrix two_way_independence_matrix(std::int64_t rows, std::int64_t cols) {
  if (rows < 1 || cols < 1) throw Error(Errc::InvalidArgument, "two-way tables need positive dimensions");
  const auto r = static_cast<std::size_t>(rows);
  const auto c = static_cast<std::size_t>(cols);
  IntMatrix a(r + c, std::vector<std::int64_t>(r * c, 0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      a[i][i * c + j] = 1;
      a[r + j][i * c + j] = 1;
    }
  }
  return a;
}

TransitionKernel::TransitionKernel(ModelSpec model, EstimatorKind kind, FiberOptions fiber)
    : model_(std::move(model)), kind_(std::move(kind)) {
  const auto& a = model_.matrix();
  std::visit(overloaded{
                 [&](const ExactUmvue&) { oracle_ = std::make_shared<FiberOracle>(model_, fiber); },
                 [&](const TwoWayRational& k) {
                   if (!model_.unit_odds()) {
                     throw Error(Errc::IncompatibleEstimator, "the rational two-way MLE needs unit odds");
                   }
                   if (k.rows < 1 || k.cols < 1 || a.to_rows() != two_way_independence_matrix(k.rows, k.cols)) {
                     throw Error(Errc::IncompatibleEstimator, "model is not the " + std::to_string(k.rows) + "x" +
                                                                  std::to_string(k.cols) + " independence model");
                   }
                 },
                 [&](const Decomposable& k) {
                   if (!model_.unit_odds()) {
                     throw Error(Errc::IncompatibleEstimator, "the decomposable MLE needs unit odds");
                   }
                   if (a.to_rows() != k.structure.configuration_matrix()) {
                     throw Error(Errc::IncompatibleEstimator, "matrix does not match the decomposable structure");
                   }
                 },
                 [&](const Ips& k) {
                   k.config.validate();
                   if (!a.nonnegative()) throw Error(Errc::NegativeEntryInA, "generalized IPS needs A >= 0");
                 },
             },
             kind_);
  if (!oracle_) oracle_ = std::make_shared<FiberOracle>(model_, fiber);
}

bool TransitionKernel::in_semigroup(const SufficientStatistics& beta) const { return oracle_->in_semigroup(beta); }

StepEstimate TransitionKernel::expected_counts(const SufficientStatistics& beta, std::int64_t remaining) const {
  check_remaining(model_.matrix(), beta, remaining);
  const auto& a = model_.matrix();
  StepEstimate out;

  const auto set_exact = [&out](std::vector<Rational> mu) {
    out.probabilities.reserve(mu.size());
    for (const auto& v : mu) out.probabilities.push_back(v.get_d());
    out.exact = std::move(mu);
  };

  std::visit(overloaded{
                 [&](const ExactUmvue&) {
                   try {
                     set_exact(oracle_->umvue(beta));
                   } catch (const Error& e) {
                     if (e.code() != Errc::EmptyFiber) throw;
                     throw Error(Errc::DegenerateState, "state is outside the semigroup NA");
                   }
                 },
                 [&](const TwoWayRational& k) {
                   const auto& v = beta.values();
                   const std::span<const std::int64_t> rows(v.data(), static_cast<std::size_t>(k.rows));
                   const std::span<const std::int64_t> cols(v.data() + k.rows, static_cast<std::size_t>(k.cols));
                   try {
                     set_exact(two_way_independence_mle(rows, cols, remaining));
                   } catch (const Error& e) {
                     throw Error(Errc::DegenerateState, e.what());
                   }
                 },
                 [&](const Decomposable& k) {
                   try {
                     set_exact(decomposable_mle(k.structure, k.structure.split(beta)));
                   } catch (const Error& e) {
                     if (e.code() == Errc::DimensionMismatch) throw;
                     throw Error(Errc::DegenerateState, e.what());
                   }
                 },
                 [&](const Ips& k) {
                   if (!beta.nonnegative()) throw Error(Errc::DegenerateState, "state has a negative statistic");
                   MleResult mle = ips_solve(model_, beta, remaining, k.config);
                   out.ips_iterations = mle.iterations;
                   if (!mle.converged) {
                     throw Error(Errc::EstimatorFailed, "generalized IPS did not converge in " +
                                                            std::to_string(k.config.max_iterations) + " iterations");
                   }
                   out.probabilities = std::move(mle.mu_hat);
                 },
             },
             kind_);
  (void)a;
  return out;
}

StepEstimate TransitionKernel::compute(const SufficientStatistics& beta, std::int64_t remaining) const {
  StepEstimate est = expected_counts(beta, remaining);
  const std::size_t m = est.probabilities.size();

  if (est.exact) {
    const Rational scale(1, static_cast<unsigned long>(remaining));
    bool any = false;
    for (std::size_t j = 0; j < m; ++j) {
      (*est.exact)[j] *= scale;
      est.probabilities[j] = (*est.exact)[j].get_d();
      any = any || (*est.exact)[j] > 0;
    }
    if (!any) throw Error(Errc::DegenerateState, "every transition probability is zero");
    return est;
  }

  // Approximate: hard zeros below epsilon/m, then renormalize onto the simplex.
  const double threshold = std::get<Ips>(kind_).config.epsilon / static_cast<double>(m);
  double total = 0.0;
  for (double& p : est.probabilities) {
    if (!(p >= threshold)) p = 0.0;
    total += p;
  }
  if (!(total > 0.0)) throw Error(Errc::DegenerateState, "every transition probability is zero");
  for (double& p : est.probabilities) p /= total;
  return est;
}

std::shared_ptr<const StepEstimate> TransitionKernel::step(const SufficientStatistics& beta,
                                                           std::int64_t remaining) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(beta); it != cache_.end()) {
      if (it->second.remaining != remaining) check_remaining(model_.matrix(), beta, remaining);
      if (it->second.failure) throw Error(*it->second.failure, it->second.message);
      return it->second.estimate;
    }
  }
  CacheEntry entry;
  entry.remaining = remaining;
  try {
    entry.estimate = std::make_shared<const StepEstimate>(compute(beta, remaining));
  } catch (const Error& e) {
    if (e.code() != Errc::EstimatorFailed && e.code() != Errc::DegenerateState) throw;
    entry.failure = e.code();
    entry.message = e.what();
  }
  {
    std::lock_guard lock(mutex_);
    if (cache_.size() < kMaxCachedStates) cache_.emplace(beta, entry);
  }
  if (entry.failure) throw Error(*entry.failure, entry.message);
  return entry.estimate;
}

std::vector<Rational> TransitionKernel::step_exact(const SufficientStatistics& beta, std::int64_t remaining) const {
  if (!exact()) throw Error(Errc::IncompatibleEstimator, "IPS step probabilities are not exact");
  return *step(beta, remaining)->exact;
}

std::vector<double> step_probabilities(const ModelSpec& model, const SufficientStatistics& beta, std::int64_t remaining,
                                       const EstimatorKind& estimator) {
  return TransitionKernel(model, estimator).step(beta, remaining)->probabilities;
}

// ---------------------------------------------------------------------------

DrawResult draw_table(const TransitionKernel& kernel, const SufficientStatistics& b, std::uint64_t seed,
                      const SamplerOptions& options) {
  const auto& a = kernel.model().matrix();
  std::int64_t n = 0;
  try {
    n = degree(a, b);
  } catch (const Error& e) {
    throw Error(Errc::InvalidB, e.what());
  }
  if (std::holds_alternative<ExactUmvue>(kernel.kind()) && !kernel.in_semigroup(b)) {
    throw Error(Errc::InvalidB, "b is not in the semigroup NA");
  }

  RandomStream rng(seed);
  DrawResult result;
  result.seed = seed;
  const std::size_t m = a.cols();

  for (;;) {
    SamplePath path;
    path.picks.reserve(static_cast<std::size_t>(n));
    std::vector<int> iterations;
    iterations.reserve(static_cast<std::size_t>(n));
    if (options.record_states) path.states.push_back(b);

    SufficientStatistics beta = b;
    bool failed = false;
    for (std::int64_t t = 1; t <= n && !failed; ++t) {
      std::shared_ptr<const StepEstimate> est;
      try {
        est = kernel.step(beta, n - t + 1);
      } catch (const Error& e) {
        if (e.code() != Errc::EstimatorFailed && e.code() != Errc::DegenerateState) throw;
        failed = true;
        break;
      }
      const std::size_t j = pick_cell(est->probabilities, rng.uniform());
      beta = subtract_column(a, beta, j);
      // Leaving N^d means the path left the lattice through round-off.
      if (a.nonnegative() && !beta.nonnegative()) failed = true;
      path.picks.push_back(j);
      iterations.push_back(est->ips_iterations);
      if (options.record_states) path.states.push_back(beta);
    }
    if (!failed && !beta.is_zero()) failed = true;

    if (!failed) {
      std::vector<std::int64_t> counts(m, 0);
      for (std::size_t j : path.picks) ++counts[j];
      result.table = CountVector(std::move(counts));
      result.path = std::move(path);
      result.ips_iterations = std::move(iterations);
      return result;
    }
    if (++result.retries > options.retry_cap) {
      throw Error(Errc::RetriesExhausted,
                  "discarded " + std::to_string(result.retries) + " sample paths for seed " + std::to_string(seed));
    }
  }
}

DrawResult draw_table(const ModelSpec& model, const SufficientStatistics& b, const EstimatorKind& estimator,
                      std::uint64_t seed, const SamplerOptions& options) {
  return draw_table(TransitionKernel(model, estimator), b, seed, options);
}

std::vector<DrawResult> draw_batch(const TransitionKernel& kernel, const SufficientStatistics& b, std::size_t count,
                                   std::uint64_t seed, const SamplerOptions& options) {
  std::vector<DrawResult> results(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) results[k] = draw_table(kernel, b, stream_seed(seed, k), options);
    return results;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += workers) {
          results[k] = draw_table(kernel, b, stream_seed(seed, k), options);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<DrawResult> draw_batch(const ModelSpec& model, const SufficientStatistics& b,
                                   const EstimatorKind& estimator, std::size_t count, std::uint64_t seed,
                                   const SamplerOptions& options) {
  return draw_batch(TransitionKernel(model, estimator), b, count, seed, options);
}

namespace {

template <class Value, class StepFn>
Value walk_path(const TransitionKernel& kernel, const SufficientStatistics& b, const SamplePath& path, StepFn step_value) {
  const auto& a = kernel.model().matrix();
  std::int64_t n = 0;
  try {
    n = degree(a, b);
  } catch (const Error& e) {
    throw Error(Errc::InconsistentPath, e.what());
  }
  if (static_cast<std::int64_t>(path.picks.size()) != n) {
    throw Error(Errc::InconsistentPath, "path has " + std::to_string(path.picks.size()) + " picks, deg(b) = " +
                                            std::to_string(n));
  }
  for (std::size_t j : path.picks) {
    if (j >= a.cols()) throw Error(Errc::InconsistentPath, "pick index out of range");
  }

  Value probability(1);
  SufficientStatistics beta = b;
  for (std::int64_t t = 1; t <= n; ++t) {
    const std::size_t j = path.picks[static_cast<std::size_t>(t - 1)];
    if (a.nonnegative() && !subtract_column(a, beta, j).nonnegative()) return Value(0);
    try {
      const Value p = step_value(beta, n - t + 1, j);
      if (p == 0) return Value(0);
      probability *= p;
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateState) throw;
      return Value(0);
    }
    beta = subtract_column(a, beta, j);
  }
  return probability;
}

}  // namespace

double path_probability(const TransitionKernel& kernel, const SufficientStatistics& b, const SamplePath& path) {
  return walk_path<double>(kernel, b, path, [&](const SufficientStatistics& beta, std::int64_t remaining, std::size_t j) {
    return kernel.step(beta, remaining)->probabilities[j];
  });
}

Rational path_probability_exact(const TransitionKernel& kernel, const SufficientStatistics& b, const SamplePath& path) {
  if (!kernel.exact()) throw Error(Errc::IncompatibleEstimator, "IPS path probabilities are not exact");
  return walk_path<Rational>(kernel, b, path,
                             [&](const SufficientStatistics& beta, std::int64_t remaining, std::size_t j) {
                               return (*kernel.step(beta, remaining)->exact)[j];
                             });
}

}  // namespace toric
