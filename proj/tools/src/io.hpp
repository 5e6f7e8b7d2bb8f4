#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toric/analysis.hpp"
#include "toric/metropolis.hpp"
#include "toric/mle.hpp"
#include "toric/model.hpp"
#include "toric/presets.hpp"

namespace toric::cli {

/// A model as read from disk. JSON files may name a preset instead of (or
/// in addition to) giving the matrix; CSV files hold only the matrix.
struct LoadedModel {
  std::string name;
  ModelSpec model;
  std::optional<SufficientStatistics> b;
  std::optional<std::vector<double>> expected;
  std::optional<CountVector> initial_table;
  std::optional<std::vector<Move>> basis;
  std::optional<EstimatorKind> estimator;
  std::vector<std::string> labels;
};

LoadedModel from_preset(const ExperimentPreset& p);

/// Throws ParseError, plus model validation errors.
LoadedModel read_model_file(const std::filesystem::path& path, std::int64_t s = 1);

/// {"levels": [...], "cliques": [[...]], "separators": [{"variables": [...], "multiplicity": k}]}
DecomposableStructure read_structure_file(const std::filesystem::path& path);

/// JSON {"moves": [[...], ...]} or CSV with one move per line.
std::vector<Move> read_moves_file(const std::filesystem::path& path);

/// Comma- or space-separated integers.
std::vector<std::int64_t> parse_int_list(const std::string& text);

enum class TableFormat { Csv, Json };

struct TableRecord {
  CountVector table;
  std::optional<double> chi_square;
  std::optional<int> retries;
  std::optional<std::uint64_t> seed;
  std::vector<int> tau;  // IPS iterations per step
  std::optional<bool> accepted;
};

struct TableFileMeta {
  std::string model;
  std::string source;  // "direct" or "metropolis"
  std::string estimator;
  std::uint64_t seed = 0;
  SufficientStatistics b;
  std::vector<std::pair<std::string, std::string>> extra;  // written verbatim as strings
};

/// CSV: one header row of cell labels (plus "accepted" when present), one row
/// per table. JSON: {"meta": {...}, "records": [...]}.
void write_tables(std::ostream& out, TableFormat format, const std::vector<std::string>& labels,
                  const TableFileMeta& meta, const std::vector<TableRecord>& records);

/// Reads tables written by write_tables (format chosen by extension or
/// content). When `a` and `b` are given, every table must satisfy A u = b
/// (ModelMismatch otherwise).
std::vector<CountVector> read_tables(const std::filesystem::path& path, const ConfigurationMatrix* a = nullptr,
                                     const SufficientStatistics* b = nullptr);

/// {"support": [...], "masses": [...]}.
std::string distribution_json(const EmpiricalDistribution& d);
EmpiricalDistribution parse_distribution_json(const std::string& text);
/// "value,mass" rows under a header.
void write_distribution_csv(std::ostream& out, const EmpiricalDistribution& d);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace toric::cli
