#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "toric/error.hpp"
#include "toric/fiber.hpp"
#include "toric/mle.hpp"
#include "toric/model.hpp"
#include "toric/rational.hpp"

namespace toric {

/// Exact transition probabilities from the UMVUE, via the fiber oracle.
struct ExactUmvue {};
/// Closed-form MLE of an r x c independence model (exact there).
struct TwoWayRational {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
};
/// Closed-form MLE of a decomposable graphical model (exact there).
struct Decomposable {
  DecomposableStructure structure;
};
/// MLE by generalized IPS (approximate sampler).
struct Ips {
  IpsConfig config;
};

using EstimatorKind = std::variant<ExactUmvue, TwoWayRational, Decomposable, Ips>;

std::string estimator_name(const EstimatorKind& kind);

/// The r x c independence matrix: E_r (x) 1_c stacked on 1_r (x) E_c.
IntMatrix two_way_independence_matrix(std::int64_t rows, std::int64_t cols);

struct StepEstimate {
  std::vector<double> probabilities;
  std::optional<std::vector<Rational>> exact;  // set for the closed-form and UMVUE kinds
  int ips_iterations = 0;
};

/// Transition kernel of the sequential sampler for one model and estimator.
/// Estimates are memoized by state; the object is safe to share between
/// threads.
class TransitionKernel {
 public:
  /// Throws IncompatibleEstimator when the estimator does not fit the model.
  TransitionKernel(ModelSpec model, EstimatorKind kind, FiberOptions fiber = {});

  const ModelSpec& model() const noexcept { return model_; }
  const EstimatorKind& kind() const noexcept { return kind_; }
  bool exact() const noexcept { return !std::holds_alternative<Ips>(kind_); }

  /// mu_j(beta) / remaining for every cell. Throws EstimatorFailed (IPS did
  /// not converge) or DegenerateState (no cell has positive probability).
  std::shared_ptr<const StepEstimate> step(const SufficientStatistics& beta, std::int64_t remaining) const;

  /// Exact step probabilities; IncompatibleEstimator for the IPS kind.
  std::vector<Rational> step_exact(const SufficientStatistics& beta, std::int64_t remaining) const;

  /// Lattice membership through the fiber oracle (shared cache).
  bool in_semigroup(const SufficientStatistics& beta) const;

  /// Expected counts, before normalization and thresholding.
  StepEstimate expected_counts(const SufficientStatistics& beta, std::int64_t remaining) const;

 private:
  struct CacheEntry {
    std::shared_ptr<const StepEstimate> estimate;
    std::int64_t remaining = 0;
    std::optional<Errc> failure;  // EstimatorFailed / DegenerateState are deterministic too
    std::string message;
  };

  StepEstimate compute(const SufficientStatistics& beta, std::int64_t remaining) const;

  ModelSpec model_;
  EstimatorKind kind_;
  std::shared_ptr<FiberOracle> oracle_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<SufficientStatistics, CacheEntry, SufficientStatisticsHash> cache_;
};

/// Step probabilities at state beta (remaining must equal degree(beta)).
std::vector<double> step_probabilities(const ModelSpec& model, const SufficientStatistics& beta, std::int64_t remaining,
                                       const EstimatorKind& estimator);

struct SamplePath {
  std::vector<std::size_t> picks;            // j_1, ..., j_n
  std::vector<SufficientStatistics> states;  // b, ..., 0 when recorded
};

struct DrawResult {
  CountVector table;
  SamplePath path;
  int retries = 0;
  std::uint64_t seed = 0;
  std::vector<int> ips_iterations;  // per step of the accepted path
};

struct SamplerOptions {
  int retry_cap = 100;
  bool record_states = false;
  unsigned threads = 1;
};

/// One table from the conditional distribution given b. Failed paths are
/// discarded and redrawn from the same stream. Throws InvalidB,
/// RetriesExhausted.
DrawResult draw_table(const TransitionKernel& kernel, const SufficientStatistics& b, std::uint64_t seed,
                      const SamplerOptions& options = {});
DrawResult draw_table(const ModelSpec& model, const SufficientStatistics& b, const EstimatorKind& estimator,
                      std::uint64_t seed, const SamplerOptions& options = {});

/// `count` draws; draw k uses stream_seed(seed, k) regardless of threading.
std::vector<DrawResult> draw_batch(const TransitionKernel& kernel, const SufficientStatistics& b, std::size_t count,
                                   std::uint64_t seed, const SamplerOptions& options = {});
std::vector<DrawResult> draw_batch(const ModelSpec& model, const SufficientStatistics& b,
                                   const EstimatorKind& estimator, std::size_t count, std::uint64_t seed,
                                   const SamplerOptions& options = {});

/// Product of step probabilities along the path; 0 once a step has zero
/// probability. Throws InconsistentPath.
double path_probability(const TransitionKernel& kernel, const SufficientStatistics& b, const SamplePath& path);
Rational path_probability_exact(const TransitionKernel& kernel, const SufficientStatistics& b, const SamplePath& path);

}  // namespace toric
