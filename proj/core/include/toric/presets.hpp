#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toric/metropolis.hpp"
#include "toric/mle.hpp"
#include "toric/model.hpp"
#include "toric/sampler.hpp"

namespace toric {

/// 6 x 8 quasi-independence matrix of the 3x3 table with a structural zero
/// at (3,3); cells u11 u12 u13 u21 u22 u23 u31 u32.
IntMatrix quasi_independence_matrix();

/// 21 x 18 no-three-way interaction matrix of the 2x3x3 table: the u_ij.,
/// u_i.k and u_.jk marginals. Cell (i,j,k) sits at 9i + 3j + k.
IntMatrix no_three_way_matrix();

/// Experiment preset: the model, b(s), the chi-square expected vector e(s)
/// and the defaults used by the experiment commands.
struct ExperimentPreset {
  std::string name;
  std::int64_t s = 1;
  ModelSpec model;
  SufficientStatistics b;
  std::vector<double> expected;
  EstimatorKind estimator;
  std::vector<std::string> labels;  // one per cell, in column order of A
  CountVector initial_table;        // Metropolis starting point
  std::optional<std::vector<Move>> basis;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();

/// Throws UnknownPreset, InvalidArgument (s < 1).
ExperimentPreset preset(std::string_view name, std::int64_t s);

/// Labels u11, u12, ... (or u111, ...) of a full table, last index fastest.
std::vector<std::string> cell_labels(const std::vector<std::int64_t>& shape);
/// u1, ..., um for models without a table layout.
std::vector<std::string> cell_labels(std::size_t cells);

}  // namespace toric
