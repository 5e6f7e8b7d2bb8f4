#include "toric/metropolis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "toric/error.hpp"
#include "toric/presets.hpp"

namespace toric {

namespace {

// log k!, grown on demand; one table per thread.
double log_factorial(std::int64_t k) {
  thread_local std::vector<double> table{0.0};
  while (static_cast<std::int64_t>(table.size()) <= k) {
    const auto next = static_cast<double>(table.size());
    table.push_back(table.back() + std::log(next));
  }
  return table[static_cast<std::size_t>(k)];
}

bool in_kernel(const ConfigurationMatrix& a, const std::vector<std::int64_t>& delta) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * delta[j];
    if (sum != 0) return false;
  }
  return true;
}

}  // namespace

std::vector<Move> basis_two_way(std::int64_t rows, std::int64_t cols) {
  if (rows < 2 || cols < 2) throw Error(Errc::InvalidArgument, "two-way bases need at least 2 rows and 2 columns");
  const auto cell = [cols](std::int64_t i, std::int64_t j) { return static_cast<std::size_t>(i * cols + j); };
  std::vector<Move> moves;
  for (std::int64_t i1 = 0; i1 < rows; ++i1) {
    for (std::int64_t i2 = i1 + 1; i2 < rows; ++i2) {
      for (std::int64_t j1 = 0; j1 < cols; ++j1) {
        for (std::int64_t j2 = j1 + 1; j2 < cols; ++j2) {
          Move mv{std::vector<std::int64_t>(static_cast<std::size_t>(rows * cols), 0)};
          mv.delta[cell(i1, j1)] = 1;
          mv.delta[cell(i2, j2)] = 1;
          mv.delta[cell(i1, j2)] = -1;
          mv.delta[cell(i2, j1)] = -1;
          moves.push_back(std::move(mv));
        }
      }
    }
  }
  return moves;
}

std::vector<Move> basis_no_three_way() {
  const auto a = validate_matrix(no_three_way_matrix());
  const auto cell = [](int i, int j, int k) { return static_cast<std::size_t>(9 * i + 3 * j + k); };
  std::vector<Move> moves;

  // Degree 4: a 2x2 minor in the (j,k) plane, with opposite signs on the
  // two layers.
  for (int j1 = 0; j1 < 3; ++j1) {
    for (int j2 = j1 + 1; j2 < 3; ++j2) {
      for (int k1 = 0; k1 < 3; ++k1) {
        for (int k2 = k1 + 1; k2 < 3; ++k2) {
          Move mv{std::vector<std::int64_t>(18, 0)};
          mv.delta[cell(0, j1, k1)] = 1;
          mv.delta[cell(0, j2, k2)] = 1;
          mv.delta[cell(1, j1, k2)] = 1;
          mv.delta[cell(1, j2, k1)] = 1;
          mv.delta[cell(0, j1, k2)] = -1;
          mv.delta[cell(0, j2, k1)] = -1;
          mv.delta[cell(1, j1, k1)] = -1;
          mv.delta[cell(1, j2, k2)] = -1;
          moves.push_back(std::move(mv));
        }
      }
    }
  }

  // Degree 6: for a permutation p, +e(0,j,p_j) + e(1,j,q_j) - e(0,j,q_j) -
  // e(1,j,p_j). The partner q is not given in closed form; every q is tried
  // and kept when the move lies in Ker A with 12 nonzero entries. Moves
  // equal up to sign are kept once, in the orientation found first.
  std::array<int, 3> p{0, 1, 2};
  do {
    std::array<int, 3> q{0, 1, 2};
    do {
      Move mv{std::vector<std::int64_t>(18, 0)};
      for (int j = 0; j < 3; ++j) {
        mv.delta[cell(0, j, p[j])] += 1;
        mv.delta[cell(1, j, q[j])] += 1;
        mv.delta[cell(0, j, q[j])] -= 1;
        mv.delta[cell(1, j, p[j])] -= 1;
      }
      const auto nonzero = std::count_if(mv.delta.begin(), mv.delta.end(), [](auto v) { return v != 0; });
      if (nonzero != 12 || !in_kernel(a, mv.delta)) continue;
      Move negated{mv.delta};
      for (auto& v : negated.delta) v = -v;
      if (std::find(moves.begin(), moves.end(), mv) == moves.end() &&
          std::find(moves.begin(), moves.end(), negated) == moves.end()) {
        moves.push_back(std::move(mv));
      }
    } while (std::next_permutation(q.begin(), q.end()));
  } while (std::next_permutation(p.begin(), p.end()));

  validate_moves(a, moves);
  return moves;
}

void validate_moves(const ConfigurationMatrix& a, const std::vector<Move>& basis) {
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& d = basis[k].delta;
    if (d.size() != a.cols()) {
      throw Error(Errc::InvalidMove, "move " + std::to_string(k) + " has " + std::to_string(d.size()) +
                                         " entries, expected " + std::to_string(a.cols()));
    }
    if (std::all_of(d.begin(), d.end(), [](auto v) { return v == 0; })) {
      throw Error(Errc::InvalidMove, "move " + std::to_string(k) + " is zero");
    }
    if (!in_kernel(a, d)) throw Error(Errc::InvalidMove, "move " + std::to_string(k) + " is not in Ker A");
  }
}

CountVector metropolis_step(const ModelSpec& model, const CountVector& current, const std::vector<Move>& basis,
                            RandomStream& rng, bool* accepted) {
  if (accepted) *accepted = false;
  if (basis.empty()) return current;
  const auto& delta = basis[rng.index(basis.size())].delta;
  const std::int64_t sign = rng.uniform() < 0.5 ? 1 : -1;

  const auto& log_x = model.log_odds();
  std::vector<std::int64_t> next(current.counts());
  double log_ratio = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j) {
    if (delta[j] == 0) continue;
    const std::int64_t step = sign * delta[j];
    next[j] += step;
    if (next[j] < 0) return current;
    log_ratio += static_cast<double>(step) * log_x[j] + log_factorial(current[j]) - log_factorial(next[j]);
  }
  if (log_ratio < 0.0 && !(rng.uniform() < std::exp(log_ratio))) return current;
  if (accepted) *accepted = true;
  return CountVector(std::move(next));
}

ChainResult run_chain(const ModelSpec& model, const ChainConfig& config, const std::vector<Move>& basis,
                      std::int64_t thinning) {
  if (config.burn_in < 0 || config.length < 0) throw Error(Errc::InvalidArgument, "burn-in and length must be >= 0");
  if (thinning < 1) throw Error(Errc::InvalidArgument, "thinning must be >= 1");
  const auto& a = model.matrix();
  if (config.initial_table.size() != a.cols()) {
    throw Error(Errc::DimensionMismatch, "initial table has " + std::to_string(config.initial_table.size()) +
                                             " cells, the model has " + std::to_string(a.cols()));
  }
  validate_moves(a, basis);

  RandomStream rng(config.seed);
  ChainResult result;
  result.states.reserve(static_cast<std::size_t>(config.length / thinning));
  result.accepted.reserve(static_cast<std::size_t>(config.length / thinning));

  CountVector state = config.initial_table;
  bool moved = false;
  for (std::int64_t t = 0; t < config.burn_in; ++t) {
    state = metropolis_step(model, state, basis, rng, &moved);
    result.acceptances += moved;
  }
  for (std::int64_t t = 1; t <= config.length; ++t) {
    state = metropolis_step(model, state, basis, rng, &moved);
    result.acceptances += moved;
    if (t % thinning == 0) {
      result.states.push_back(state);
      result.accepted.push_back(moved);
    }
  }
  result.proposals = config.burn_in + config.length;
  return result;
}

}  // namespace toric
