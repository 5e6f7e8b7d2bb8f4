#include "toric/error.hpp"

namespace toric {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::ZeroRowOrColumn: return "ZeroRowOrColumn";
    case Errc::OnesNotInRowspan: return "OnesNotInRowspan";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonIntegralDegree: return "NonIntegralDegree";
    case Errc::NonPositiveOdds: return "NonPositiveOdds";
    case Errc::NegativeCount: return "NegativeCount";
    case Errc::FiberTooLarge: return "FiberTooLarge";
    case Errc::NotInFiber: return "NotInFiber";
    case Errc::EmptyFiber: return "EmptyFiber";
    case Errc::MarginalMismatch: return "MarginalMismatch";
    case Errc::ZeroTotal: return "ZeroTotal";
    case Errc::InconsistentMarginals: return "InconsistentMarginals";
    case Errc::ZeroSeparatorWithPositiveClique: return "ZeroSeparatorWithPositiveClique";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::NegativeEntryInA: return "NegativeEntryInA";
    case Errc::NotConverged: return "NotConverged";
    case Errc::InvalidStructure: return "InvalidStructure";
    case Errc::IncompatibleEstimator: return "IncompatibleEstimator";
    case Errc::EstimatorFailed: return "EstimatorFailed";
    case Errc::DegenerateState: return "DegenerateState";
    case Errc::RetriesExhausted: return "RetriesExhausted";
    case Errc::InvalidB: return "InvalidB";
    case Errc::InconsistentPath: return "InconsistentPath";
    case Errc::InvalidMove: return "InvalidMove";
    case Errc::NonPositiveExpected: return "NonPositiveExpected";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ConstantSequence: return "ConstantSequence";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::NoBasisAvailable: return "NoBasisAvailable";
    case Errc::ModelMismatch: return "ModelMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_numerical_failure(Errc code) noexcept {
  switch (code) {
    case Errc::FiberTooLarge:
    case Errc::NotConverged:
    case Errc::EstimatorFailed:
    case Errc::DegenerateState:
    case Errc::RetriesExhausted:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace toric
