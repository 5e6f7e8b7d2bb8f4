#include <CLI11.hpp>
#include <ostream>

#include "commands.hpp"
#include "toric/error.hpp"

namespace toric::cli {

namespace {

void add_model_options(CLI::App& cmd, ModelOptions& m) {
  cmd.add_option("--preset", m.preset, "Built-in experiment preset")
      ->check(CLI::IsMember(preset_names()));
  cmd.add_option("--model-file", m.model_file, "Model as JSON {matrix, odds, b, ...} or a CSV matrix");
  cmd.add_option("--s", m.s, "Scale parameter of the preset marginals")->check(CLI::PositiveNumber);
  cmd.add_option("--b", m.b, "Sufficient statistics, comma separated (overrides the preset)");
  cmd.add_option("--structure", m.structure_file, "Decomposable structure JSON for --estimator decomposable");
}

void add_estimator_options(CLI::App& cmd, EstimatorOptions& e) {
  cmd.add_option("--estimator", e.name, "Transition probabilities: exact, rational, decomposable or ips")
      ->check(CLI::IsMember({"exact", "rational", "decomposable", "ips"}));
  cmd.add_option("--epsilon", e.epsilon, "IPS convergence tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--max-iter", e.max_iterations, "IPS iteration cap")->check(CLI::PositiveNumber);
}

void add_format_option(CLI::App& cmd, TableFormat& f) {
  cmd.add_option("--format", f, "Table file format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, TableFormat>{{"csv", TableFormat::Csv},
                                                                               {"json", TableFormat::Json}},
                                          CLI::ignore_case));
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling contingency tables from the conditional distribution of log-affine models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "toric 0.1.0");

  SampleOptions sample;
  auto* cmd_sample = app.add_subcommand("sample", "Draw tables with the direct sampler");
  add_model_options(*cmd_sample, sample.model);
  add_estimator_options(*cmd_sample, sample.estimator);
  cmd_sample->add_option("--count", sample.count, "Number of tables");
  cmd_sample->add_option("--seed", sample.seed, "Master seed");
  cmd_sample->add_option("--out", sample.out, "Table file");
  add_format_option(*cmd_sample, sample.format);
  cmd_sample->add_option("--summary", sample.summary, "Summary JSON file");
  cmd_sample->add_option("--threads", sample.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_sample->add_option("--retry-cap", sample.retry_cap, "Discarded paths allowed per table")
      ->check(CLI::NonNegativeNumber);

  ChainOptions chain;
  auto* cmd_chain = app.add_subcommand("chain", "Run a Metropolis chain over a Markov basis");
  add_model_options(*cmd_chain, chain.model);
  cmd_chain->add_option("--burn-in", chain.burn_in, "Proposals discarded before recording")
      ->check(CLI::NonNegativeNumber);
  cmd_chain->add_option("--length", chain.length, "Proposals recorded")->check(CLI::NonNegativeNumber);
  cmd_chain->add_option("--thinning", chain.thinning, "Record every k-th state")->check(CLI::PositiveNumber);
  cmd_chain->add_option("--seed", chain.seed, "Seed");
  cmd_chain->add_option("--moves-file", chain.moves_file, "Markov basis, JSON {moves} or CSV rows");
  cmd_chain->add_option("--initial", chain.initial, "Initial table, comma separated");
  cmd_chain->add_option("--out", chain.out, "Table file");
  add_format_option(*cmd_chain, chain.format);
  cmd_chain->add_option("--summary", chain.summary, "Summary JSON file");

  CompareOptions compare;
  auto* cmd_compare = app.add_subcommand(
      "compare", "Total variation between two chi-square distributions. Sources: a table file, file:PATH, "
                 "dist:PATH, exact, direct:COUNT, direct:ESTIMATOR:COUNT, chain:BURN_IN:LENGTH");
  add_model_options(*cmd_compare, compare.model);
  add_estimator_options(*cmd_compare, compare.estimator);
  cmd_compare->add_option("sources", compare.sources, "Two sources")->expected(2)->required();
  cmd_compare->add_option("--seed", compare.seed, "Seed for generated sources");
  cmd_compare->add_option("--threads", compare.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_compare->add_option("--out", compare.out, "Report JSON file");

  ReproduceOptions reproduce;
  auto* cmd_reproduce = app.add_subcommand("reproduce", "Re-run the Metropolis-versus-direct TV grid");
  cmd_reproduce->add_option("--table", reproduce.table, "1 (two-way 4x5) or 4 (no-three-way)")
      ->check(CLI::IsMember({1, 4}));
  cmd_reproduce->add_option("--repetitions", reproduce.repetitions, "Chains per cell")->check(CLI::PositiveNumber);
  cmd_reproduce->add_option("--s", reproduce.s_values, "Scale values")->delimiter(',');
  cmd_reproduce->add_option("--reference-count", reproduce.reference_count, "Direct draws for the reference");
  cmd_reproduce->add_option("--length-scale", reproduce.length_scale, "Multiplier for burn-in and length")
      ->check(CLI::PositiveNumber);
  cmd_reproduce->add_option("--cache-dir", reproduce.cache_dir, "Reference cache directory (empty: no cache)");
  cmd_reproduce->add_option("--seed", reproduce.seed, "Master seed");
  cmd_reproduce->add_option("--threads", reproduce.threads, "Worker threads for references")
      ->check(CLI::PositiveNumber);
  cmd_reproduce->add_option("--out", reproduce.out, "Report JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_sample) return run_sample(sample, out);
    if (*cmd_chain) return run_chain(chain, out);
    if (*cmd_compare) return run_compare(compare, out);
    if (*cmd_reproduce) return run_reproduce(reproduce, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace toric::cli
