#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sid {

enum class ErrorKind {
  InvalidInput,
  DuplicateLabel,
  NonpositiveWeight,
  EmptySpace,
  SpaceMismatch,
  DimensionMismatch,
  SymbolicFiber,
  NotUpperTriangular,
  DiagonalNotConstant,
  SingularBlock,
  IllConditionedSpectrum,
  CriterionViolated,
  DimensionTooLarge,
  SpectralClusteringAmbiguous,
  NotIdempotent,
  NotInCommutant,
  SingularCertificate,
  RankNotMultipleOfN,
  NotAbelian,
  FamilyNotMaximal,
  InconsistentTrace,
  NonIntegerClass,
  DifferentBaseOperator,
  NotSIForm,
  HypothesisUnsupported,
  SizeLimit,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `atom` names the offending atom when
/// the failure is local to one cell; `value` carries the measured quantity
/// (deviation, condition estimate, rank) when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string atom = {},
        double value = 0.0);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& atom() const noexcept { return atom_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  std::string atom_;
  double value_;
};

}  // namespace sid
