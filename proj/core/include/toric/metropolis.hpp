#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toric/model.hpp"
#include "toric/rng.hpp"

namespace toric {

/// A move of a Markov basis: an integer vector in Ker A.
struct Move {
  std::vector<std::int64_t> delta;

  friend bool operator==(const Move&, const Move&) = default;
};

/// Basic moves e_{i1 j1} + e_{i2 j2} - e_{i1 j2} - e_{i2 j1}, i1 < i2, j1 < j2,
/// over row-major cells. Throws InvalidArgument unless rows, cols >= 2.
std::vector<Move> basis_two_way(std::int64_t rows, std::int64_t cols);

/// Markov basis of the 2x3x3 no-three-way interaction model: nine degree-4
/// moves followed by six degree-6 moves.
std::vector<Move> basis_no_three_way();

/// Throws InvalidMove when a move has the wrong length, is zero, or is not
/// in Ker A.
void validate_moves(const ConfigurationMatrix& a, const std::vector<Move>& basis);

/// One Metropolis proposal. A proposal leaving N^m counts as a step where
/// the chain stays. `accepted` (optional) reports whether the state moved.
CountVector metropolis_step(const ModelSpec& model, const CountVector& current, const std::vector<Move>& basis,
                            RandomStream& rng, bool* accepted = nullptr);

struct ChainConfig {
  std::int64_t burn_in = 0;
  std::int64_t length = 0;
  std::uint64_t seed = 0;
  CountVector initial_table;
};

struct ChainResult {
  std::vector<CountVector> states;  // recorded states after burn-in
  std::vector<bool> accepted;       // per recorded state: did its proposal move?
  std::int64_t proposals = 0;       // including burn-in
  std::int64_t acceptances = 0;     // including burn-in
  double acceptance_rate() const noexcept {
    return proposals > 0 ? static_cast<double>(acceptances) / static_cast<double>(proposals) : 0.0;
  }
};

/// Runs burn_in proposals, then `length` proposals recording every
/// `thinning`-th state. Throws InvalidMove, InvalidArgument.
ChainResult run_chain(const ModelSpec& model, const ChainConfig& config, const std::vector<Move>& basis,
                      std::int64_t thinning = 1);

}  // namespace toric
