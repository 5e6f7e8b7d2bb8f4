#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toric {

enum class Errc {
  // model
  EmptyMatrix,
  ZeroRowOrColumn,
  OnesNotInRowspan,
  DimensionMismatch,
  NonIntegralDegree,
  NonPositiveOdds,
  NegativeCount,
  // fiber oracle
  FiberTooLarge,
  NotInFiber,
  EmptyFiber,
  // mle
  MarginalMismatch,
  ZeroTotal,
  InconsistentMarginals,
  ZeroSeparatorWithPositiveClique,
  ZeroDenominator,
  NegativeEntryInA,
  NotConverged,
  InvalidStructure,
  // sampler
  IncompatibleEstimator,
  EstimatorFailed,
  DegenerateState,
  RetriesExhausted,
  InvalidB,
  InconsistentPath,
  // metropolis
  InvalidMove,
  // analysis
  NonPositiveExpected,
  EmptyInput,
  ConstantSequence,
  // experiments / io
  UnknownPreset,
  NoBasisAvailable,
  ModelMismatch,
  ParseError,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

/// True for failures of the numerics (as opposed to bad input).
bool is_numerical_failure(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace toric
