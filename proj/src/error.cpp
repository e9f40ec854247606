#include "sid/error.hpp"

namespace sid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::EmptySpace: return "EmptySpace";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SymbolicFiber: return "SymbolicFiber";
    case ErrorKind::NotUpperTriangular: return "NotUpperTriangular";
    case ErrorKind::DiagonalNotConstant: return "DiagonalNotConstant";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::IllConditionedSpectrum: return "IllConditionedSpectrum";
    case ErrorKind::CriterionViolated: return "CriterionViolated";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::SpectralClusteringAmbiguous: return "SpectralClusteringAmbiguous";
    case ErrorKind::NotIdempotent: return "NotIdempotent";
    case ErrorKind::NotInCommutant: return "NotInCommutant";
    case ErrorKind::SingularCertificate: return "SingularCertificate";
    case ErrorKind::RankNotMultipleOfN: return "RankNotMultipleOfN";
    case ErrorKind::NotAbelian: return "NotAbelian";
    case ErrorKind::FamilyNotMaximal: return "FamilyNotMaximal";
    case ErrorKind::InconsistentTrace: return "InconsistentTrace";
    case ErrorKind::NonIntegerClass: return "NonIntegerClass";
    case ErrorKind::DifferentBaseOperator: return "DifferentBaseOperator";
    case ErrorKind::NotSIForm: return "NotSIForm";
    case ErrorKind::HypothesisUnsupported: return "HypothesisUnsupported";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string atom,
             double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      atom_(std::move(atom)),
      value_(value) {}

}  // namespace sid
