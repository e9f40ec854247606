#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sid/measure_field.hpp"

namespace sid {

/// Jordan structure of a single-eigenvalue block. When `similarity` is set,
/// block * X = X * J with J = jordan_matrix().
struct JordanReport {
  Complex eigenvalue;
  std::vector<int> block_sizes;  // in the column order of `similarity`
  bool is_single_block = false;
  std::optional<Matrix> similarity;
  double residual = 0.0;  // ||T X - X J||_F

  Matrix jordan_matrix() const;
};

struct SIVerdict {
  std::vector<std::optional<bool>> per_atom;  // empty on infinite atoms
  bool overall = true;
  std::map<std::size_t, Matrix> witnesses;    // atom index -> nontrivial commuting idempotent
};

/// Superdiagonal criterion: an upper-triangular constant-diagonal block is
/// strongly irreducible iff every entry (i, i+1) is nonzero.
SIVerdict si_test_superdiagonal(const SITriangularForm& form, const Tolerances& tol = {});

/// Independent check: a finite matrix is strongly irreducible iff its spectrum
/// is one point alpha and rank(block - alpha I) = n - 1.
bool si_test_general(const Matrix& block, const Tolerances& tol = {});

/// Upper-triangular X with T X = X J_n(alpha), built from x_nn = 1 and the
/// recursion x_{i-1} = N x_i on columns (N = T - alpha I).
JordanReport jordan_similarity(const Matrix& block, const Tolerances& tol = {});

/// Jordan chains of a single-eigenvalue block from the kernel flag of
/// N = T - (tr T / n) I. Works for any number of blocks.
JordanReport jordan_structure(const Matrix& block, const Tolerances& tol = {});

/// Idempotent onto the first Jordan chain along the others; throws
/// CriterionViolated when the block is a single Jordan block.
Matrix commuting_idempotent_witness(const Matrix& block, const Tolerances& tol = {});

}  // namespace sid
