#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sid/measure_field.hpp"

namespace sid {

/// Orthonormal (trace inner product) basis of {T(λ)}' for one block.
struct CommutantBasis {
  std::optional<std::size_t> atom;
  std::vector<Matrix> basis;
  double max_residual = 0.0;  // max ||T B - B T||_F over the basis

  int dimension() const noexcept { return static_cast<int>(basis.size()); }
};

/// Atoms whose diagonal values coincide within the clustering tolerance.
struct SpectralClass {
  Complex phi;
  std::vector<std::size_t> atoms;
};

/// Atoms of one spectral class carrying bit-identical blocks. Their joint
/// commutant is M_k(fiber commutant), of dimension k^2 * d.
struct IdenticalGroup {
  std::vector<std::size_t> atoms;
  CommutantBasis fiber;

  int coupled_dimension() const noexcept {
    const int k = static_cast<int>(atoms.size());
    return k * k * fiber.dimension();
  }
};

struct ClassCommutant {
  SpectralClass spectral;
  std::vector<IdenticalGroup> groups;
  /// Set when the coupled Sylvester system over the whole class was solved.
  std::optional<int> full_dimension;
  std::vector<Matrix> full_basis;  // on the direct sum of the class blocks

  /// Distinct blocks in one class couple; without a full solve that coupling
  /// is left out of the prediction.
  bool coupling_omitted() const noexcept { return groups.size() > 1 && !full_dimension; }
  int predicted_dimension() const;
};

/// Block-diagonal layout across spectral classes: no commuting field couples
/// atoms with distinct diagonal values.
struct CommutantStructure {
  std::vector<ClassCommutant> classes;

  int total_dimension() const;
};

/// Single-linkage clustering of complex values at threshold
/// `tol.spec * (1 + max|value|)`. Throws SpectralClusteringAmbiguous if any pair
/// lies in (threshold, 10 * threshold]. Returns a cluster id per value, ids
/// numbered by first appearance.
std::vector<int> cluster_spectral_values(const std::vector<Complex>& values,
                                         const Tolerances& tol = {});
double spectral_threshold(const std::vector<Complex>& values, const Tolerances& tol);

/// Nullspace of X -> T X - X T via SVD at `tol.null * sigma_max`.
CommutantBasis fiber_commutant(const Matrix& block, const Tolerances& tol = {});

/// Commutant of the direct sum of `blocks` (all cross terms included).
std::vector<Matrix> coupled_commutant(const std::vector<Matrix>& blocks,
                                      const Tolerances& tol = {});

Matrix direct_sum(const std::vector<Matrix>& blocks);

CommutantStructure field_commutant_structure(const MatrixField& t, const Tolerances& tol = {},
                                             bool full_solve = false);

/// True iff x commutes with t atomwise and every block of x is upper
/// triangular with constant diagonal.
bool verify_commuting_triangular_form(const SITriangularForm& t, const MatrixField& x, const Tolerances& tol = {});

}  // namespace sid
