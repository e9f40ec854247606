#pragma once

#include <map>
#include <string>
#include <vector>

#include "sid/commutant_algebra.hpp"
#include "sid/measure_field.hpp"

namespace sid {

/// An idempotent field Q in M_m({T}'), stored on the amplified space in the
/// copy-major layout produced by amplify(T, m).
struct IdempotentField {
  MatrixField field;
  MatrixField base;  // T, unamplified
  int m = 1;
  double norm_bound = 0.0;  // max_λ ||Q(λ)||_2

  /// Checks ||Q^2 - Q|| <= tol.idem (1 + ||Q||^2) and commutation with
  /// amplify(T, m) on every atom.
  static IdempotentField make(MatrixField q, MatrixField base, const Tolerances& tol = {});
};

/// One factor of a certificate, in the layout it acts on.
struct LogEntry {
  std::string name;
  std::string note;
  MatrixField factor;
};

/// Invertible X in M_m({T}') witnessing a conjugation. `construction_log`
/// lists factors in application order: X = F_last ... F_2 F_1.
struct SimilarityCertificate {
  MatrixField x;
  MatrixField x_inv;
  MatrixField reference;  // amplify(T, m)
  std::vector<double> condition;
  std::vector<LogEntry> construction_log;
  double commutation_residual = 0.0;  // max_λ ||T X - X T|| / (||T|| ||X||)
  double inverse_residual = 0.0;      // max_λ ||X X^-1 - I||_F

  SimilarityCertificate compose_after(const SimilarityCertificate& first) const;
  SimilarityCertificate inverse() const;
};

struct PointwiseReduction {
  Matrix projection;  // diag(1,...,1,0,...,0)
  Matrix y;           // y * p * y^-1 = projection
  Matrix y_inv;
  Matrix unitary;     // brings p to [[I, R], [0, 0]]
  Matrix shear;       // [[I, R], [0, I]]
  int rank = 0;
  double norm_bound = 0.0;  // 1 + ||p||_2
};

/// Unitary change of basis followed by the shear [[I,R],[0,I]].
PointwiseReduction reduce_pointwise(const Matrix& p, const Tolerances& tol = {});

struct Canonicalization {
  IdempotentField projection;  // P*, diagonal with entries in {0, 1}
  SimilarityCertificate certificate;
  double residual = 0.0;  // max_λ |X Q X^-1 - P*|, before rounding
};

/// Conjugates an idempotent of M_m({T}') to a diagonal projection whose
/// supports are nested (copy a+1 ⊆ copy a).
Canonicalization canonicalize_in_commutant(const IdempotentField& q, const Tolerances& tol = {});

struct RankProfile {
  std::vector<std::optional<int>> per_atom;  // rank(Q(λ)) / n
  bool is_constant = true;
  std::map<int, std::vector<std::size_t>> value_partition;
};

RankProfile rank_profile(const IdempotentField& q, const Tolerances& tol = {});

/// The standard family E_1..E_m: E_a is the identity on copy a.
std::vector<IdempotentField> standard_family(const MatrixField& base, int m);

/// Descends the lattice generated by a commuting family to m orthogonal
/// idempotents of normalized rank 1 on every atom.
std::vector<IdempotentField> extract_minimal_family(const std::vector<IdempotentField>& family,
                                                    int m, const Tolerances& tol = {});

struct Alignment {
  SimilarityCertificate certificate;  // X Q_i X^-1 = E_i
  std::vector<IdempotentField> minimal;
  double residual = 0.0;  // max over family members of the distance to a diagonal projection
};

/// Sequential alignment X = X_m ... X_1 of the minimal idempotents onto the
/// standard positions; every family member then maps to a diagonal projection.
Alignment align_family(const std::vector<IdempotentField>& family, const Tolerances& tol = {});

struct FamilyMap {
  SimilarityCertificate certificate;  // maps `from` onto `onto`
  double residual = 0.0;
};

/// X = X_onto^-1 X_from: conjugates the lattice of `from` onto that of `onto`.
FamilyMap map_family_onto(const std::vector<IdempotentField>& from,
                          const std::vector<IdempotentField>& onto, const Tolerances& tol = {});

/// Per-atom algebras for a base operator in strongly irreducible form.
std::vector<std::optional<CommutantAlgebra>> commutant_algebras(const MatrixField& base,
                                                                const Tolerances& tol = {});

// Single-atom building blocks on coefficient series. The field-level
// operations above are assembled from these.

struct SeriesReduction {
  Series x;
  Series x_inv;
  Matrix projection;          // m x m, diagonal 0/1
  Matrix y;                   // pointwise reduction of the constant term
  Matrix permutation;         // sort to descending diagonal
  std::vector<Matrix> sweep;  // E_k for k = 1..n-1; factor k is I + N^k (x) E_k
  double residual = 0.0;
};

SeriesReduction canonicalize_series(const CommutantAlgebra& algebra, const Series& q,
                                    const Tolerances& tol = {});

/// Splits the identity into m pieces of normalized rank 1 using products of
/// the generators and their complements. Throws FamilyNotMaximal naming
/// `atom` when some piece admits no intermediate-rank refinement.
std::vector<Series> minimal_pieces(const CommutantAlgebra& algebra,
                                   const std::vector<Series>& generators, int m,
                                   const Tolerances& tol, const std::string& atom);

struct SeriesAlignment {
  Series x;
  Series x_inv;
  std::vector<SeriesReduction> steps;  // corner reductions, step i acts on copies [i, m)
};

SeriesAlignment align_series(const CommutantAlgebra& algebra, const std::vector<Series>& minimal,
                             const Tolerances& tol = {});

/// Rank of the constant term, which equals rank(Q) / n for an idempotent series.
int series_rank(const Series& q, const Tolerances& tol = {});

}  // namespace sid
