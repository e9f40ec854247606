#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sid/k_theory.hpp"

namespace sid {

/// Multiplicity at one spectrum point of one dimension class; empty
/// `multiplicity` means infinite.
struct PointMultiplicity {
  std::optional<Complex> phi;  // empty for an infinite atom declared without a value
  std::optional<int> multiplicity;
  std::vector<std::size_t> atoms;
};

struct ClassProfile {
  std::optional<int> dim;  // empty for atoms in no finite class (Λ_∞)
  std::vector<PointMultiplicity> points;
  bool is_simple = true;
  int finite_atoms = 0;
};

struct MultiplicityProfile {
  std::vector<ClassProfile> per_class;  // finite classes ascending, then Λ_∞
  bool is_simple = true;
};

MultiplicityProfile multiplicity_profile(const MatrixField& t, const Tolerances& tol = {});

/// True iff no spectrum point is shared by two dimension classes.
bool check_mutual_singularity(const MatrixField& t, const Tolerances& tol = {});

struct ClassReason {
  std::optional<int> dim;
  bool simple = true;
  std::string reason;
};

struct UniquenessVerdict {
  bool unique = false;
  std::vector<ClassReason> reasons;
  MultiplicityProfile profile;
  K0Descriptor k0;
  /// unique == (K0 has no zero-contribution class).
  bool k0_consistent = false;
};

/// Throws NotSIForm when some fiber is not strongly irreducible and
/// HypothesisUnsupported when several classes share spectrum points.
UniquenessVerdict decide_uniqueness(const MatrixField& t, const Tolerances& tol = {});

struct ClassSubproblem {
  std::optional<int> dim;
  std::vector<std::size_t> atoms;  // indices in the original space
  MatrixField field;
};

/// One independent field per dimension class (Λ_∞ last).
std::vector<ClassSubproblem> split_commutant_by_class(const MatrixField& t, const Tolerances& tol = {});

/// Atoms sharing a finite spectrum point. When their blocks coincide the
/// point is the amplification of one fiber, `base` on a one-atom space.
struct MultiplicitySubproblem {
  Complex phi;
  int multiplicity = 1;
  std::vector<std::size_t> atoms;
  bool identical_blocks = true;
  MatrixField base;
};

std::vector<MultiplicitySubproblem> multiplicity_subproblems(const MatrixField& t,
                                                             const Tolerances& tol = {});

}  // namespace sid
