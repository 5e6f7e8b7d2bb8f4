#include "io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "toric/error.hpp"

namespace toric::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

namespace {

bool has_extension(const fs::path& p, std::string_view ext) {
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

bool looks_like_json(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && (text[pos] == '{' || text[pos] == '[');
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, what + ": " + e.what());
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::int64_t parse_int(const std::string& field) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || field.empty()) throw Error(Errc::ParseError, "not an integer: '" + field + "'");
  return v;
}

// Rows of integers; blank lines and '#' comments are skipped.
IntMatrix read_int_rows(const std::string& text) {
  IntMatrix rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::vector<std::int64_t> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_int(f));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
std::vector<T> get_vector(const json& j, const char* key) {
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

Rational odds_entry(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return make_rational(v.get<std::int64_t>());
  if (v.is_number()) return rational_from_double(v.get<double>());
  throw Error(Errc::ParseError, "odds entries must be numbers or \"p/q\" strings");
}

std::vector<Move> moves_from_rows(IntMatrix rows) {
  std::vector<Move> moves;
  moves.reserve(rows.size());
  for (auto& r : rows) moves.push_back(Move{std::move(r)});
  return moves;
}

}  // namespace

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& f : split_fields(text)) out.push_back(parse_int(f));
  return out;
}

LoadedModel from_preset(const ExperimentPreset& p) {
  return LoadedModel{p.name, p.model, p.b, p.expected, p.initial_table, p.basis, p.estimator, p.labels};
}

LoadedModel read_model_file(const fs::path& path, std::int64_t s) {
  const std::string text = read_file(path);

  if (!has_extension(path, ".json") && !looks_like_json(text)) {
    auto matrix = validate_matrix(read_int_rows(text));
    const auto m = matrix.cols();
    return LoadedModel{path.stem().string(), ModelSpec::log_linear(std::move(matrix)), {}, {}, {}, {}, {},
                       cell_labels(m)};
  }

  const json j = parse_json(text, path.string());
  if (!j.is_object()) throw Error(Errc::ParseError, path.string() + ": model file must hold a JSON object");
  if (j.contains("s")) s = j.at("s").get<std::int64_t>();

  std::optional<LoadedModel> loaded;
  if (j.contains("preset")) loaded = from_preset(preset(j.at("preset").get<std::string>(), s));

  if (j.contains("matrix")) {
    auto matrix = validate_matrix(get_vector<std::vector<std::int64_t>>(j, "matrix"));
    std::vector<Rational> odds;
    if (j.contains("odds")) {
      for (const auto& v : j.at("odds")) odds.push_back(odds_entry(v));
    } else {
      odds.assign(matrix.cols(), Rational(1));
    }
    const auto m = matrix.cols();
    ModelSpec model(std::move(matrix), std::move(odds));
    if (loaded && !(loaded->model.matrix() == model.matrix())) {
      // A different matrix replaces everything tied to the preset's layout.
      loaded.reset();
    }
    if (loaded) {
      loaded->model = std::move(model);
    } else {
      loaded = LoadedModel{path.stem().string(), std::move(model), {}, {}, {}, {}, {}, cell_labels(m)};
    }
  } else if (!loaded) {
    throw Error(Errc::ParseError, path.string() + ": model file needs 'matrix' or 'preset'");
  } else if (j.contains("odds")) {
    std::vector<Rational> odds;
    for (const auto& v : j.at("odds")) odds.push_back(odds_entry(v));
    loaded->model = ModelSpec(loaded->model.matrix(), std::move(odds));
  }

  auto& out = *loaded;
  if (j.contains("name")) out.name = j.at("name").get<std::string>();
  if (j.contains("b")) out.b = SufficientStatistics(get_vector<std::int64_t>(j, "b"));
  if (j.contains("expected")) out.expected = get_vector<double>(j, "expected");
  if (j.contains("initial_table")) out.initial_table = CountVector(get_vector<std::int64_t>(j, "initial_table"));
  if (j.contains("labels")) out.labels = get_vector<std::string>(j, "labels");
  if (j.contains("moves")) out.basis = moves_from_rows(get_vector<std::vector<std::int64_t>>(j, "moves"));

  const auto m = out.model.matrix().cols();
  if (out.labels.size() != m) throw Error(Errc::DimensionMismatch, "labels must name every cell");
  if (out.expected && out.expected->size() != m) throw Error(Errc::DimensionMismatch, "expected needs one entry per cell");
  if (out.b && out.b->size() != out.model.matrix().rows()) {
    throw Error(Errc::DimensionMismatch, "b needs one entry per row of A");
  }
  return out;
}

DecomposableStructure read_structure_file(const fs::path& path) {
  const json j = parse_json(read_file(path), path.string());
  try {
    std::vector<DecomposableStructure::Separator> separators;
    for (const auto& sep : j.at("separators")) {
      separators.push_back({sep.at("variables").get<std::vector<std::size_t>>(), sep.value("multiplicity", 1)});
    }
    return DecomposableStructure(j.at("levels").get<std::vector<std::int64_t>>(),
                                 j.at("cliques").get<std::vector<std::vector<std::size_t>>>(), std::move(separators));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

std::vector<Move> read_moves_file(const fs::path& path) {
  const std::string text = read_file(path);
  if (has_extension(path, ".json") || looks_like_json(text)) {
    const json j = parse_json(text, path.string());
    const json& rows = j.is_object() ? j.at("moves") : j;
    try {
      return moves_from_rows(rows.get<IntMatrix>());
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
  }
  return moves_from_rows(read_int_rows(text));
}

void write_tables(std::ostream& out, TableFormat format, const std::vector<std::string>& labels,
                  const TableFileMeta& meta, const std::vector<TableRecord>& records) {
  if (format == TableFormat::Csv) {
    const bool flags = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.accepted.has_value(); });
    for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
    if (flags) out << ",accepted";
    out << '\n';
    for (const auto& r : records) {
      for (std::size_t j = 0; j < r.table.size(); ++j) out << (j ? "," : "") << r.table[j];
      if (flags) out << ',' << (r.accepted.value_or(false) ? 1 : 0);
      out << '\n';
    }
    return;
  }

  json m = json::object();
  m["model"] = meta.model;
  m["source"] = meta.source;
  if (!meta.estimator.empty()) m["estimator"] = meta.estimator;
  m["seed"] = meta.seed;
  m["b"] = meta.b.values();
  m["labels"] = labels;
  m["count"] = records.size();
  for (const auto& [k, v] : meta.extra) m[k] = v;

  json recs = json::array();
  for (const auto& r : records) {
    json rec = json::object();
    rec["table"] = r.table.counts();
    if (r.chi_square) rec["chi_square"] = *r.chi_square;
    if (r.retries) rec["retries"] = *r.retries;
    if (r.seed) rec["seed"] = *r.seed;
    if (!r.tau.empty()) rec["tau"] = r.tau;
    if (r.accepted) rec["accepted"] = *r.accepted;
    recs.push_back(std::move(rec));
  }
  out << json{{"meta", std::move(m)}, {"records", std::move(recs)}}.dump(1) << '\n';
}

std::vector<CountVector> read_tables(const fs::path& path, const ConfigurationMatrix* a, const SufficientStatistics* b) {
  const std::string text = read_file(path);
  std::vector<CountVector> tables;

  if (has_extension(path, ".json") || looks_like_json(text)) {
    const json j = parse_json(text, path.string());
    try {
      for (const auto& rec : j.at("records")) tables.emplace_back(rec.at("table").get<std::vector<std::int64_t>>());
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t cells = 0;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto fields = split_fields(line);
      if (fields.empty()) continue;
      if (header) {
        header = false;
        cells = static_cast<std::size_t>(
            std::count_if(fields.begin(), fields.end(), [](const auto& f) { return f != "accepted"; }));
        if (!fields.empty() && std::isdigit(static_cast<unsigned char>(fields[0][0]))) {
          throw Error(Errc::ParseError, path.string() + ": missing header row");
        }
        continue;
      }
      if (fields.size() < cells) {
        throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                          std::to_string(cells) + " cells");
      }
      std::vector<std::int64_t> counts;
      counts.reserve(cells);
      for (std::size_t k = 0; k < cells; ++k) counts.push_back(parse_int(fields[k]));
      tables.emplace_back(std::move(counts));
    }
  }

  if (a) {
    for (std::size_t k = 0; k < tables.size(); ++k) {
      if (tables[k].size() != a->cols()) {
        throw Error(Errc::ModelMismatch, path.string() + ": table " + std::to_string(k) + " has " +
                                             std::to_string(tables[k].size()) + " cells, the model has " +
                                             std::to_string(a->cols()));
      }
      if (b && sufficient_statistics(*a, tables[k]) != *b) {
        throw Error(Errc::ModelMismatch, path.string() + ": table " + std::to_string(k) + " is not in the fiber of b");
      }
    }
  }
  return tables;
}

std::string distribution_json(const EmpiricalDistribution& d) {
  return json{{"support", d.support}, {"masses", d.masses}}.dump();
}

EmpiricalDistribution parse_distribution_json(const std::string& text) {
  const json j = parse_json(text, "distribution");
  EmpiricalDistribution d;
  try {
    d.support = j.at("support").get<std::vector<double>>();
    d.masses = j.at("masses").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("distribution: ") + e.what());
  }
  if (d.support.size() != d.masses.size()) throw Error(Errc::ParseError, "distribution: support and masses differ in length");
  return d;
}

void write_distribution_csv(std::ostream& out, const EmpiricalDistribution& d) {
  out << "chi_square,mass\n";
  for (std::size_t k = 0; k < d.size(); ++k) out << d.support[k] << ',' << d.masses[k] << '\n';
}

}  // namespace toric::cli
