#include "toric/presets.hpp"

#include <string>

#include "toric/error.hpp"

namespace toric {

IntMatrix quasi_independence_matrix() {
  return {
      {1, 1, 1, 0, 0, 0, 0, 0},  //
      {0, 0, 0, 1, 1, 1, 0, 0},  //
      {0, 0, 0, 0, 0, 0, 1, 1},  //
      {1, 0, 0, 1, 0, 0, 1, 0},  //
      {0, 1, 0, 0, 1, 0, 0, 1},  //
      {0, 0, 1, 0, 0, 1, 0, 0},
  };
}

IntMatrix no_three_way_matrix() {
  IntMatrix a(21, std::vector<std::int64_t>(18, 0));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const auto cell = static_cast<std::size_t>(9 * i + 3 * j + k);
        a[static_cast<std::size_t>(3 * i + j)][cell] = 1;       // u_ij.
        a[static_cast<std::size_t>(6 + 3 * i + k)][cell] = 1;   // u_i.k
        a[static_cast<std::size_t>(12 + 3 * j + k)][cell] = 1;  // u_.jk
      }
    }
  }
  return a;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"indep-4x5",    "nonindep-4x5", "nonindep-3x4",
                                              "no3way-2x3x3", "indep-2x2",    "quasi-3x3"};
  return names;
}

std::vector<std::string> cell_labels(const std::vector<std::int64_t>& shape) {
  std::vector<std::string> labels{"u"};
  for (std::int64_t levels : shape) {
    std::vector<std::string> next;
    next.reserve(labels.size() * static_cast<std::size_t>(levels));
    for (const auto& prefix : labels) {
      for (std::int64_t l = 1; l <= levels; ++l) next.push_back(prefix + std::to_string(l));
    }
    labels = std::move(next);
  }
  return labels;
}

std::vector<std::string> cell_labels(std::size_t cells) {
  std::vector<std::string> labels;
  labels.reserve(cells);
  for (std::size_t j = 1; j <= cells; ++j) labels.push_back("u" + std::to_string(j));
  return labels;
}

namespace {

std::vector<Rational> flatten_odds(const std::vector<std::vector<Rational>>& rows) {
  std::vector<Rational> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<std::int64_t> repeat(std::size_t count, std::int64_t value) { return std::vector<std::int64_t>(count, value); }

std::vector<std::int64_t> concat(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ExperimentPreset make(std::string name, std::int64_t s, const IntMatrix& a, std::vector<Rational> odds,
                      std::vector<std::int64_t> b, std::vector<double> expected, EstimatorKind estimator,
                      std::vector<std::string> labels, std::vector<std::int64_t> initial,
                      std::optional<std::vector<Move>> basis) {
  auto matrix = validate_matrix(a);
  return ExperimentPreset{std::move(name),
                          s,
                          ModelSpec(std::move(matrix), std::move(odds)),
                          SufficientStatistics(std::move(b)),
                          std::move(expected),
                          std::move(estimator),
                          std::move(labels),
                          CountVector(std::move(initial)),
                          std::move(basis)};
}

std::vector<Rational> ones(std::size_t m) { return std::vector<Rational>(m, Rational(1)); }

}  // namespace

ExperimentPreset preset(std::string_view name, std::int64_t s) {
  if (s < 1) throw Error(Errc::InvalidArgument, "scale s must be >= 1, got " + std::to_string(s));
  const auto sd = static_cast<double>(s);
  const Rational r1(1);

  if (name == "indep-4x5" || name == "nonindep-4x5") {
    const bool indep = name == "indep-4x5";
    std::vector<Rational> odds =
        indep ? ones(20)
              : flatten_odds({{3, 2, r1, r1, r1}, {2, 2, r1, r1, r1}, {r1, r1, r1, r1, r1}, {r1, r1, r1, r1, r1}});
    EstimatorKind est = indep ? EstimatorKind(TwoWayRational{4, 5}) : EstimatorKind(Ips{IpsConfig{0.1, 1000}});
    return make(std::string(name), s, two_way_independence_matrix(4, 5), std::move(odds),
                concat(repeat(4, 5 * s), repeat(5, 4 * s)), std::vector<double>(20, sd), std::move(est),
                cell_labels({4, 5}), repeat(20, s), basis_two_way(4, 5));
  }
  if (name == "nonindep-3x4") {
    auto odds = flatten_odds({{Rational(3), Rational(2), Rational(100, 101), r1},
                              {Rational(200, 104), Rational(200, 103), Rational(100, 102), r1},
                              {r1, r1, r1, r1}});
    for (auto& x : odds) x.canonicalize();
    return make(std::string(name), s, two_way_independence_matrix(3, 4), std::move(odds),
                concat(repeat(3, 4 * s), repeat(4, 3 * s)), std::vector<double>(12, sd), Ips{IpsConfig{0.1, 1000}},
                cell_labels({3, 4}), repeat(12, s), basis_two_way(3, 4));
  }
  if (name == "no3way-2x3x3") {
    return make(std::string(name), s, no_three_way_matrix(), ones(18), concat(repeat(12, 3 * s), repeat(9, 2 * s)),
                std::vector<double>(18, sd), Ips{IpsConfig{0.005, 1000}}, cell_labels({2, 3, 3}), repeat(18, s),
                basis_no_three_way());
  }
  if (name == "indep-2x2") {
    // The table (1,0,1,1) scaled; its fiber at s = 1 is {(1,0,1,1), (0,1,2,0)}.
    return make(std::string(name), s, two_way_independence_matrix(2, 2), ones(4), {s, 2 * s, 2 * s, s},
                {2.0 * sd / 3.0, sd / 3.0, 4.0 * sd / 3.0, 2.0 * sd / 3.0}, ExactUmvue{}, cell_labels({2, 2}),
                {s, 0, s, s}, basis_two_way(2, 2));
  }
  if (name == "quasi-3x3") {
    // Margins (3s,3s,2s) both ways; the all-s table on the eight free cells
    // solves A mu = b, so it is the MLE.
    return make(std::string(name), s, quasi_independence_matrix(), ones(8),
                {3 * s, 3 * s, 2 * s, 3 * s, 3 * s, 2 * s}, std::vector<double>(8, sd), ExactUmvue{},
                {"u11", "u12", "u13", "u21", "u22", "u23", "u31", "u32"}, repeat(8, s), std::nullopt);
  }
  throw Error(Errc::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

}  // namespace toric
