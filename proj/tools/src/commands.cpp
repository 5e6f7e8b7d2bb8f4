#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>

#include "toric/analysis.hpp"
#include "toric/error.hpp"
#include "toric/fiber.hpp"
#include "toric/metropolis.hpp"
#include "toric/rng.hpp"

namespace toric::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::optional<std::pair<std::int64_t, std::int64_t>> two_way_shape(const ConfigurationMatrix& a) {
  const auto m = static_cast<std::int64_t>(a.cols());
  const auto d = static_cast<std::int64_t>(a.rows());
  const auto rows = a.to_rows();
  for (std::int64_t r = 1; r <= m; ++r) {
    if (m % r != 0 || r + m / r != d) continue;
    if (rows == two_way_independence_matrix(r, m / r)) return std::pair{r, m / r};
  }
  return std::nullopt;
}

std::optional<std::vector<double>> mle_expected(const ModelSpec& model, const SufficientStatistics& b) {
  if (!model.matrix().nonnegative()) return std::nullopt;
  const auto n = degree(model.matrix(), b);
  if (n == 0) return std::nullopt;
  const auto mle = ips_solve(model, b, n, IpsConfig{1e-9, 100000});
  if (!mle.converged) return std::nullopt;
  if (std::any_of(mle.mu_hat.begin(), mle.mu_hat.end(), [](double v) { return !(v > 0.0); })) return std::nullopt;
  return mle.mu_hat;
}

const std::vector<double>& require_expected(const Problem& p) {
  if (!p.expected) {
    throw Error(Errc::InvalidArgument, "no chi-square expected vector: give 'expected' in the model file");
  }
  return *p.expected;
}

std::vector<double> chi_squares(const std::vector<CountVector>& tables, const std::vector<double>& expected) {
  std::vector<double> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(chi_square(t, expected));
  return out;
}

void print_distribution(std::ostream& log, const EmpiricalDistribution& d, std::size_t limit = 40) {
  log << "  chi-square      mass\n";
  for (std::size_t k = 0; k < d.size() && k < limit; ++k) {
    log << "  " << std::setw(12) << d.support[k] << "  " << std::fixed << std::setprecision(6) << d.masses[k]
        << std::defaultfloat << std::setprecision(6) << '\n';
  }
  if (d.size() > limit) log << "  ... (" << d.size() - limit << " more atoms)\n";
}

std::string format_table(const CountVector& u) {
  std::string s = "(";
  for (std::size_t j = 0; j < u.size(); ++j) s += (j ? "," : "") + std::to_string(u[j]);
  return s + ")";
}

CountVector first_fiber_element(const ConfigurationMatrix& a, const SufficientStatistics& b) {
  std::optional<CountVector> found;
  for_each_fiber_element(a, b, [&](std::span<const std::int64_t> v) {
    found = CountVector(std::vector<std::int64_t>(v.begin(), v.end()));
    return false;
  });
  if (!found) throw Error(Errc::InvalidB, "b is not in the semigroup NA; the fiber is empty");
  return *found;
}

std::string meta_number(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> estimator_meta(const EstimatorKind& est) {
  if (const auto* ips = std::get_if<Ips>(&est)) {
    return {{"epsilon", meta_number(ips->config.epsilon)},
            {"max_iterations", std::to_string(ips->config.max_iterations)}};
  }
  return {};
}

void emit_tables(const std::string& out_path, TableFormat format, const Problem& p, TableFileMeta meta,
                 const std::vector<TableRecord>& records) {
  if (out_path.empty()) return;
  meta.model = p.loaded.name;
  meta.b = p.b;
  std::ostringstream ss;
  write_tables(ss, format, p.loaded.labels, meta, records);
  write_file(out_path, ss.str());
}

struct ChainSetup {
  std::vector<Move> basis;
  CountVector initial;
};

ChainSetup chain_setup(const Problem& p, const std::string& moves_file, const std::string& initial) {
  ChainSetup setup;
  const auto& a = p.loaded.model.matrix();
  if (!moves_file.empty()) {
    setup.basis = read_moves_file(moves_file);
  } else if (p.loaded.basis) {
    setup.basis = *p.loaded.basis;
  } else {
    throw Error(Errc::NoBasisAvailable, "model '" + p.loaded.name + "' has no built-in Markov basis; pass --moves-file");
  }
  try {
    validate_moves(a, setup.basis);
  } catch (const Error& e) {
    throw Error(Errc::NoBasisAvailable, std::string("rejected move list: ") + e.what());
  }

  if (!initial.empty()) {
    setup.initial = CountVector(parse_int_list(initial));
  } else if (p.loaded.initial_table) {
    setup.initial = *p.loaded.initial_table;
  } else {
    setup.initial = first_fiber_element(a, p.b);
  }
  if (setup.initial.size() != a.cols() || sufficient_statistics(a, setup.initial) != p.b) {
    throw Error(Errc::InvalidArgument, "initial table " + format_table(setup.initial) + " is not in the fiber of b");
  }
  return setup;
}

}  // namespace

// ---------------------------------------------------------------------------

Problem resolve_problem(const ModelOptions& options) {
  if (!options.preset.empty() && !options.model_file.empty()) {
    throw Error(Errc::InvalidArgument, "--preset and --model-file are mutually exclusive");
  }
  std::optional<LoadedModel> loaded;
  if (!options.model_file.empty()) {
    loaded = read_model_file(options.model_file, options.s);
  } else if (!options.preset.empty()) {
    loaded = from_preset(preset(options.preset, options.s));
  } else {
    throw Error(Errc::InvalidArgument, "one of --preset or --model-file is required");
  }

  const auto& a = loaded->model.matrix();
  std::optional<SufficientStatistics> b;
  bool overridden = false;
  if (!options.b.empty()) {
    b = SufficientStatistics(parse_int_list(options.b));
    overridden = !(loaded->b && *loaded->b == *b);
  } else {
    b = loaded->b;
  }
  if (!b) throw Error(Errc::InvalidArgument, "no sufficient statistics: pass --b");
  if (b->size() != a.rows()) {
    throw Error(Errc::DimensionMismatch, "b has " + std::to_string(b->size()) + " entries, A has " +
                                             std::to_string(a.rows()) + " rows");
  }
  try {
    degree(a, *b);
  } catch (const Error& e) {
    throw Error(Errc::InvalidB, e.what());
  }

  std::optional<std::vector<double>> expected;
  if (!overridden) expected = loaded->expected;
  if (!expected) expected = mle_expected(loaded->model, *b);
  if (overridden) loaded->initial_table.reset();
  return Problem{std::move(*loaded), std::move(*b), std::move(expected)};
}

EstimatorKind resolve_estimator(const Problem& problem, const ModelOptions& model, const EstimatorOptions& options) {
  const auto& a = problem.loaded.model.matrix();
  const auto tune = [&](IpsConfig config) {
    if (options.epsilon) config.epsilon = *options.epsilon;
    if (options.max_iterations) config.max_iterations = *options.max_iterations;
    config.validate();
    return Ips{config};
  };

  if (options.name.empty()) {
    if (problem.loaded.estimator) {
      if (const auto* ips = std::get_if<Ips>(&*problem.loaded.estimator)) return tune(ips->config);
      return *problem.loaded.estimator;
    }
    return tune(IpsConfig{});
  }
  if (options.name == "exact") return ExactUmvue{};
  if (options.name == "ips") {
    IpsConfig base;
    if (problem.loaded.estimator) {
      if (const auto* ips = std::get_if<Ips>(&*problem.loaded.estimator)) base = ips->config;
    }
    return tune(base);
  }
  if (options.name == "rational") {
    const auto shape = two_way_shape(a);
    if (!shape) throw Error(Errc::IncompatibleEstimator, "the rational estimator needs a two-way independence model");
    return TwoWayRational{shape->first, shape->second};
  }
  if (options.name == "decomposable") {
    if (!model.structure_file.empty()) return Decomposable{read_structure_file(model.structure_file)};
    if (const auto shape = two_way_shape(a)) {
      return Decomposable{DecomposableStructure::two_way(shape->first, shape->second)};
    }
    throw Error(Errc::IncompatibleEstimator, "the decomposable estimator needs --structure");
  }
  throw Error(Errc::InvalidArgument, "unknown estimator '" + options.name + "'");
}

EmpiricalDistribution reference_distribution(const Problem& problem, const EstimatorKind& estimator,
                                             std::size_t count, std::uint64_t seed, unsigned threads,
                                             const std::string& cache_dir, std::ostream& log) {
  const auto& expected = require_expected(problem);
  fs::path cache_file;
  if (!cache_dir.empty()) {
    std::string key = problem.loaded.name + "-b";
    for (auto v : problem.b.values()) key += "_" + std::to_string(v);
    key += "-" + estimator_name(estimator);
    if (const auto* ips = std::get_if<Ips>(&estimator)) key += "-eps" + meta_number(ips->config.epsilon);
    key += "-n" + std::to_string(count) + "-seed" + std::to_string(seed) + ".json";
    cache_file = fs::path(cache_dir) / key;
    if (fs::exists(cache_file)) {
      log << "reference: cached " << cache_file.string() << '\n';
      return parse_distribution_json(read_file(cache_file));
    }
  }

  const auto t0 = Clock::now();
  TransitionKernel kernel(problem.loaded.model, estimator);
  SamplerOptions so;
  so.threads = threads;
  const auto draws = draw_batch(kernel, problem.b, count, seed, so);
  std::vector<double> values;
  values.reserve(draws.size());
  for (const auto& d : draws) values.push_back(chi_square(d.table, expected));
  auto dist = empirical_distribution(values);
  log << "reference: " << count << " direct draws (" << estimator_name(estimator) << ") in " << std::fixed
      << std::setprecision(2) << seconds_since(t0) << " s" << std::defaultfloat << std::setprecision(6) << '\n';
  if (!cache_file.empty()) write_file(cache_file, distribution_json(dist) + "\n");
  return dist;
}

EmpiricalDistribution exact_distribution(const Problem& problem) {
  const auto& expected = require_expected(problem);
  const auto& model = problem.loaded.model;
  const auto fiber = enumerate_fiber(model.matrix(), problem.b);
  if (fiber.empty()) throw Error(Errc::InvalidB, "b is not in the semigroup NA; the fiber is empty");
  std::vector<Rational> weights;
  weights.reserve(fiber.size());
  Rational total(0);
  for (const auto& v : fiber) {
    weights.push_back(monomial_weight(model, v.counts()));
    total += weights.back();
  }
  for (auto& w : weights) w /= total;
  return exact_chi_square_distribution(fiber, weights, expected);
}

// ---------------------------------------------------------------------------

int run_sample(const SampleOptions& options, std::ostream& log) {
  const Problem p = resolve_problem(options.model);
  const EstimatorKind est = resolve_estimator(p, options.model, options.estimator);
  const auto t0 = Clock::now();
  TransitionKernel kernel(p.loaded.model, est);
  SamplerOptions so;
  so.retry_cap = options.retry_cap;
  so.threads = std::max(1u, options.threads);
  const auto draws =
      options.count ? draw_batch(kernel, p.b, options.count, options.seed, so) : std::vector<DrawResult>{};
  const double elapsed = seconds_since(t0);

  std::vector<TableRecord> records;
  records.reserve(draws.size());
  std::vector<double> chi;
  std::int64_t retries = 0;
  std::map<int, std::size_t> tau_hist;
  std::map<CountVector, std::size_t> table_counts;
  for (const auto& d : draws) {
    TableRecord r{d.table, std::nullopt, d.retries, d.seed, d.ips_iterations, std::nullopt};
    if (p.expected) {
      r.chi_square = chi_square(d.table, *p.expected);
      chi.push_back(*r.chi_square);
    }
    retries += d.retries;
    for (int t : d.ips_iterations) ++tau_hist[t];
    ++table_counts[d.table];
    records.push_back(std::move(r));
  }

  TableFileMeta meta;
  meta.source = "direct";
  meta.estimator = estimator_name(est);
  meta.seed = options.seed;
  meta.extra = estimator_meta(est);
  emit_tables(options.out, options.format, p, meta, records);

  const double attempts = static_cast<double>(options.count) + static_cast<double>(retries);
  const double discard_rate = attempts > 0 ? static_cast<double>(retries) / attempts : 0.0;
  log << "model: " << p.loaded.name << "  estimator: " << estimator_name(est) << "  seed: " << options.seed << '\n';
  log << "tables: " << options.count << "  discarded paths: " << retries << "  discard rate: " << discard_rate << '\n';
  log << "elapsed: " << std::fixed << std::setprecision(3) << elapsed << " s" << std::defaultfloat
      << std::setprecision(6) << '\n';

  std::vector<std::pair<CountVector, std::size_t>> top(table_counts.begin(), table_counts.end());
  std::stable_sort(top.begin(), top.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  if (!top.empty()) {
    log << "most frequent tables (" << table_counts.size() << " distinct):\n";
    for (std::size_t k = 0; k < top.size() && k < 10; ++k) {
      log << "  " << format_table(top[k].first) << "  "
          << static_cast<double>(top[k].second) / static_cast<double>(options.count) << '\n';
    }
  }

  std::optional<EmpiricalDistribution> dist;
  if (!chi.empty()) {
    dist = empirical_distribution(chi);
    log << "chi-square distribution (" << dist->size() << " atoms):\n";
    print_distribution(log, *dist);
  } else {
    log << "chi-square distribution: (no tables)\n";
  }
  if (!tau_hist.empty()) {
    log << "IPS iterations per step:";
    for (const auto& [t, c] : tau_hist) log << ' ' << t << ':' << c;
    log << '\n';
  }

  if (!options.summary.empty()) {
    json s = json::object();
    s["model"] = p.loaded.name;
    s["estimator"] = estimator_name(est);
    s["seed"] = options.seed;
    s["count"] = options.count;
    s["discarded_paths"] = retries;
    s["discard_rate"] = discard_rate;
    s["chi_square"] = dist ? json::parse(distribution_json(*dist)) : json{{"support", json::array()}, {"masses", json::array()}};
    json hist = json::object();
    for (const auto& [t, c] : tau_hist) hist[std::to_string(t)] = c;
    s["ips_iterations"] = hist;
    json tables = json::array();
    for (std::size_t k = 0; k < top.size() && k < 10; ++k) {
      tables.push_back({{"table", top[k].first.counts()}, {"count", top[k].second}});
    }
    s["top_tables"] = tables;
    write_file(options.summary, s.dump(1) + "\n");
  }
  return 0;
}

int run_chain(const ChainOptions& options, std::ostream& log) {
  const Problem p = resolve_problem(options.model);
  const auto setup = chain_setup(p, options.moves_file, options.initial);

  const auto t0 = Clock::now();
  const auto result = toric::run_chain(p.loaded.model, ChainConfig{options.burn_in, options.length, options.seed, setup.initial},
                                       setup.basis, options.thinning);
  const double elapsed = seconds_since(t0);

  std::vector<TableRecord> records;
  records.reserve(result.states.size());
  std::vector<double> chi;
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    TableRecord r{result.states[k], std::nullopt, std::nullopt, std::nullopt, {}, static_cast<bool>(result.accepted[k])};
    if (p.expected) {
      r.chi_square = chi_square(r.table, *p.expected);
      chi.push_back(*r.chi_square);
    }
    records.push_back(std::move(r));
  }
  TableFileMeta meta;
  meta.source = "metropolis";
  meta.seed = options.seed;
  meta.extra = {{"burn_in", std::to_string(options.burn_in)},
                {"length", std::to_string(options.length)},
                {"thinning", std::to_string(options.thinning)},
                {"acceptance_rate", meta_number(result.acceptance_rate())}};
  emit_tables(options.out, options.format, p, meta, records);

  log << "model: " << p.loaded.name << "  moves: " << setup.basis.size() << "  seed: " << options.seed << '\n';
  log << "burn-in: " << options.burn_in << "  length: " << options.length << "  recorded: " << result.states.size()
      << '\n';
  log << "acceptance rate: " << result.acceptance_rate() << '\n';
  log << "elapsed: " << std::fixed << std::setprecision(3) << elapsed << " s" << std::defaultfloat
      << std::setprecision(6) << '\n';

  std::optional<EssReport> ess;
  std::optional<EmpiricalDistribution> dist;
  if (!chi.empty()) {
    dist = empirical_distribution(chi);
    log << "chi-square distribution (" << dist->size() << " atoms):\n";
    print_distribution(log, *dist);
    try {
      ess = effective_sample_size(chi);
      log << "ESS of chi-square: " << ess->ess << " (lags summed: " << ess->autocorrelations.size() << ")\n";
    } catch (const Error& e) {
      log << "ESS of chi-square: undefined (" << e.what() << ")\n";
    }
  }

  if (!options.summary.empty()) {
    json s = json::object();
    s["model"] = p.loaded.name;
    s["seed"] = options.seed;
    s["burn_in"] = options.burn_in;
    s["length"] = options.length;
    s["recorded"] = result.states.size();
    s["acceptance_rate"] = result.acceptance_rate();
    if (dist) s["chi_square"] = json::parse(distribution_json(*dist));
    if (ess) {
      s["ess"] = {{"n", ess->n}, {"ess", ess->ess}, {"autocorrelations", ess->autocorrelations},
                  {"censor_rho", ess->censor_rho}};
    }
    write_file(options.summary, s.dump(1) + "\n");
  }
  return 0;
}

namespace {

EmpiricalDistribution source_distribution(const std::string& source, const Problem& p, const CompareOptions& options,
                                          std::uint64_t seed, std::ostream& log) {
  const auto& expected = require_expected(p);
  const auto colon = source.find(':');
  const std::string kind = colon == std::string::npos ? "" : source.substr(0, colon);
  const std::string rest = colon == std::string::npos ? source : source.substr(colon + 1);

  if (source == "exact") return exact_distribution(p);
  if (kind == "dist") return parse_distribution_json(read_file(rest));
  if (kind == "direct") {
    EstimatorOptions est = options.estimator;
    std::string count_text = rest;
    if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
      est.name = rest.substr(0, c2);
      count_text = rest.substr(c2 + 1);
    }
    const auto count = parse_int_list(count_text);
    if (count.size() != 1 || count[0] < 1) throw Error(Errc::InvalidArgument, "direct source needs a count >= 1");
    return reference_distribution(p, resolve_estimator(p, options.model, est), static_cast<std::size_t>(count[0]),
                                  seed, options.threads, "", log);
  }
  if (kind == "chain") {
    std::string fields = rest;
    std::replace(fields.begin(), fields.end(), ':', ' ');
    const auto parts = parse_int_list(fields);
    if (parts.size() != 2) throw Error(Errc::InvalidArgument, "chain source is chain:BURN_IN:LENGTH");
    const auto setup = chain_setup(p, "", "");
    const auto result = toric::run_chain(p.loaded.model, ChainConfig{parts[0], parts[1], seed, setup.initial}, setup.basis);
    return empirical_distribution(chi_squares(result.states, expected));
  }
  const std::string path = kind == "file" ? rest : source;
  const auto& a = p.loaded.model.matrix();
  return empirical_distribution(chi_squares(read_tables(path, &a, &p.b), expected));
}

}  // namespace

int run_compare(const CompareOptions& options, std::ostream& log) {
  if (options.sources.size() != 2) throw Error(Errc::InvalidArgument, "compare needs exactly two sources");
  const Problem p = resolve_problem(options.model);
  std::vector<EmpiricalDistribution> dists;
  for (std::size_t k = 0; k < 2; ++k) {
    dists.push_back(source_distribution(options.sources[k], p, options, stream_seed(options.seed, k), log));
  }
  const double tv = total_variation(dists[0], dists[1]);
  const double tv2 = tv_squared(dists[0], dists[1]);
  for (std::size_t k = 0; k < 2; ++k) {
    log << "source " << k + 1 << ": " << options.sources[k] << '\n';
    print_distribution(log, dists[k]);
  }
  log << "total variation: " << tv << '\n';
  log << "squared variant: " << tv2 << '\n';
  if (!options.out.empty()) {
    json r = json::object();
    r["model"] = p.loaded.name;
    r["sources"] = options.sources;
    r["distributions"] = {json::parse(distribution_json(dists[0])), json::parse(distribution_json(dists[1]))};
    r["total_variation"] = tv;
    r["tv_squared"] = tv2;
    write_file(options.out, r.dump(1) + "\n");
  }
  return 0;
}

}  // namespace toric::cli
