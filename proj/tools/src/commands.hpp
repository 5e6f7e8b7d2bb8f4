#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"
#include "toric/sampler.hpp"

namespace toric::cli {

struct ModelOptions {
  std::string preset;
  std::string model_file;
  std::int64_t s = 1;
  std::string b;               // overrides the preset's b
  std::string structure_file;  // decomposable estimator
};

struct EstimatorOptions {
  std::string name;  // exact | rational | decomposable | ips; empty: model default
  std::optional<double> epsilon;
  std::optional<int> max_iterations;
};

struct SampleOptions {
  ModelOptions model;
  EstimatorOptions estimator;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::string out;
  TableFormat format = TableFormat::Csv;
  std::string summary;
  unsigned threads = 1;
  int retry_cap = 100;
};

struct ChainOptions {
  ModelOptions model;
  std::int64_t burn_in = 0;
  std::int64_t length = 1000;
  std::int64_t thinning = 1;
  std::uint64_t seed = 1;
  std::string moves_file;
  std::string initial;
  std::string out;
  TableFormat format = TableFormat::Csv;
  std::string summary;
};

struct CompareOptions {
  ModelOptions model;
  EstimatorOptions estimator;
  std::vector<std::string> sources;  // exactly two
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

struct ReproduceOptions {
  int table = 1;
  int repetitions = 10;
  std::vector<std::int64_t> s_values{1, 2, 5, 10};
  std::size_t reference_count = 0;  // 0: 10^6 for table 1, 5 * 10^5 for table 4
  double length_scale = 1.0;
  std::string cache_dir = "reference-cache";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

/// Resolved model, b and chi-square expected vector for a command.
struct Problem {
  LoadedModel loaded;
  SufficientStatistics b;
  std::optional<std::vector<double>> expected;
};

Problem resolve_problem(const ModelOptions& options);
EstimatorKind resolve_estimator(const Problem& problem, const ModelOptions& model, const EstimatorOptions& options);

/// Chi-square distribution of a batch of direct draws, cached on disk under
/// `cache_dir` (empty: no cache).
EmpiricalDistribution reference_distribution(const Problem& problem, const EstimatorKind& estimator,
                                             std::size_t count, std::uint64_t seed, unsigned threads,
                                             const std::string& cache_dir, std::ostream& log);

/// Exact chi-square distribution through fiber enumeration.
EmpiricalDistribution exact_distribution(const Problem& problem);

// Each command writes its human-readable report to `log` and returns the
// process exit code. Errors propagate as toric::Error.
int run_sample(const SampleOptions& options, std::ostream& log);
int run_chain(const ChainOptions& options, std::ostream& log);
int run_compare(const CompareOptions& options, std::ostream& log);
int run_reproduce(const ReproduceOptions& options, std::ostream& log);

/// Full CLI entry point (argument parsing, dispatch, exit codes).
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace toric::cli
