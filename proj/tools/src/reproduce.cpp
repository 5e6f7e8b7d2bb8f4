#include <chrono>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <ostream>

#include "commands.hpp"
#include "toric/analysis.hpp"
#include "toric/error.hpp"
#include "toric/rng.hpp"

namespace toric::cli {

namespace {

struct Design {
  std::vector<std::string> presets;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (burn-in, length)
  std::size_t reference_count;
};

Design design_for(int table) {
  if (table == 1) {
    return {{"indep-4x5", "nonindep-4x5"}, {{0, 1000}, {1000, 10000}, {10000, 10000}, {10000, 100000}}, 1000000};
  }
  if (table == 4) {
    return {{"no3way-2x3x3"}, {{1000, 10000}, {10000, 10000}, {100000, 10000}, {100000, 100000}}, 500000};
  }
  throw Error(Errc::InvalidArgument, "reproduce supports tables 1 and 4, got " + std::to_string(table));
}

std::int64_t scaled(std::int64_t v, double factor) { return static_cast<std::int64_t>(std::llround(static_cast<double>(v) * factor)); }

}  // namespace

int run_reproduce(const ReproduceOptions& options, std::ostream& log) {
  using Clock = std::chrono::steady_clock;
  if (options.repetitions < 1) throw Error(Errc::InvalidArgument, "repetitions must be >= 1");
  if (!(options.length_scale > 0.0)) throw Error(Errc::InvalidArgument, "length scale must be positive");
  const Design design = design_for(options.table);
  const std::size_t ref_count = options.reference_count ? options.reference_count : design.reference_count;

  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [burn, len] : design.pairs) {
    pairs.push_back({scaled(burn, options.length_scale), std::max<std::int64_t>(1, scaled(len, options.length_scale))});
  }

  log << "table " << options.table << ": repetitions " << options.repetitions << ", reference draws " << ref_count;
  if (options.repetitions == 1) log << "  [single repetition: no averaging, expect wider Monte Carlo noise]";
  log << '\n';

  std::uint64_t row_index = 0;
  for (const auto& name : design.presets) {
    for (const auto s : options.s_values) {
      ++row_index;
      ModelOptions mo;
      mo.preset = name;
      mo.s = s;
      const Problem p = resolve_problem(mo);
      const EstimatorKind est = resolve_estimator(p, mo, {});

      EmpiricalDistribution reference;
      std::string reference_kind;
      if (options.table == 4 && s == 1) {
        reference = exact_distribution(p);
        reference_kind = "exact";
      } else {
        reference = reference_distribution(p, est, ref_count, stream_seed(options.seed, 1000000 + row_index),
                                           options.threads, options.cache_dir, log);
        reference_kind = "direct-" + estimator_name(est);
      }

      const auto setup_basis = *p.loaded.basis;
      const auto initial = *p.loaded.initial_table;
      nlohmann::json means = nlohmann::json::array();
      nlohmann::json sds = nlohmann::json::array();
      log << std::setw(14) << name << "  s=" << std::setw(2) << s << " ";
      for (std::size_t c = 0; c < design.pairs.size(); ++c) {
        const auto burn = pairs[c][0].get<std::int64_t>();
        const auto len = pairs[c][1].get<std::int64_t>();
        double sum = 0.0;
        double sum_sq = 0.0;
        const auto t0 = Clock::now();
        for (int rep = 0; rep < options.repetitions; ++rep) {
          const auto seed = stream_seed(options.seed, (row_index * 16 + c) * 1000003ULL + static_cast<std::uint64_t>(rep));
          const auto chain = toric::run_chain(p.loaded.model, ChainConfig{burn, len, seed, initial}, setup_basis);
          std::vector<double> chi;
          chi.reserve(chain.states.size());
          for (const auto& u : chain.states) chi.push_back(chi_square(u, *p.expected));
          const double tv = total_variation(empirical_distribution(chi), reference);
          sum += tv;
          sum_sq += tv * tv;
        }
        const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        const double n = options.repetitions;
        const double mean = sum / n;
        const double sd = options.repetitions > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1))) : 0.0;
        means.push_back(mean);
        sds.push_back(sd);
        log << "  " << std::fixed << std::setprecision(3) << mean << " (" << std::setprecision(1)
            << elapsed / n << "s)" << std::defaultfloat << std::setprecision(6);
      }
      log << '\n';
      rows.push_back({{"model", name}, {"s", s}, {"reference", reference_kind}, {"tv_mean", means}, {"tv_sd", sds}});
    }
  }

  if (!options.out.empty()) {
    nlohmann::json report = {{"table", options.table},
                             {"repetitions", options.repetitions},
                             {"reference_count", ref_count},
                             {"seed", options.seed},
                             {"pairs", pairs},
                             {"rows", rows}};
    if (options.repetitions == 1) report["note"] = "single repetition: no averaging";
    write_file(options.out, report.dump(1) + "\n");
  }
  return 0;
}

}  // namespace toric::cli
