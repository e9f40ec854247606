#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sid/linalg.hpp"
#include "sid/tolerances.hpp"

namespace sid {

/// One cell of the atomic measure space. `fiber_dim` is empty for a symbolic
/// infinite fiber, which never carries matrix data. Such atoms may declare the
/// finite dimension class they repeat with infinite multiplicity and the
/// spectral value they sit at.
struct Atom {
  std::string label;
  double weight = 1.0;
  std::optional<int> fiber_dim;
  std::optional<int> infinite_class;
  std::optional<Complex> spectral_value;

  bool is_infinite() const noexcept { return !fiber_dim.has_value(); }
  int dim() const;
};

/// A group of atoms sharing one fiber dimension (empty `dim` = the infinite class).
struct DimensionClass {
  std::optional<int> dim;
  std::vector<std::size_t> atoms;
};

class AtomicSpace;
using SpacePtr = std::shared_ptr<const AtomicSpace>;

class AtomicSpace {
 public:
  /// Validates labels, weights and non-emptiness; insertion order is kept and
  /// is the canonical block ordering everywhere.
  static SpacePtr build(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& atom(std::size_t i) const { return atoms_.at(i); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  /// Finite classes ascending by dimension, then the infinite class if present.
  const std::vector<DimensionClass>& dimension_classes() const noexcept { return classes_; }

  /// How many times the original fibers have been amplified.
  int amplification() const noexcept { return amplification_; }
  /// Fiber dimension before amplification.
  int base_dim(std::size_t i) const { return atom(i).dim() / amplification_; }

  SpacePtr amplified(int m) const;
  /// Same atoms, weights and base dimensions, ignoring amplification.
  bool same_base(const AtomicSpace& other) const;
  bool same_as(const AtomicSpace& other) const;
  double total_weight() const;
  bool has_infinite() const;

 private:
  AtomicSpace() = default;
  void compute_classes();

  std::vector<Atom> atoms_;
  std::vector<DimensionClass> classes_;
  int amplification_ = 1;
};

/// Convenience for (label, weight, fiber_dim) triples; fiber_dim 0 means INF.
struct AtomDescription {
  std::string label;
  double weight;
  int fiber_dim;
};
SpacePtr build_space(const std::vector<AtomDescription>& descriptions);

/// Piecewise-constant matrix field: one n x n block per finite atom.
class MatrixField {
 public:
  MatrixField(SpacePtr space, std::vector<std::optional<Matrix>> blocks);

  static MatrixField identity(SpacePtr space);
  static MatrixField zero(SpacePtr space);
  static MatrixField from_blocks(SpacePtr space,
                                 const std::function<Matrix(std::size_t)>& make);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  bool has_block(std::size_t i) const { return blocks_.at(i).has_value(); }
  const Matrix& block(std::size_t i) const;
  const Matrix& block(std::string_view label) const;
  std::vector<std::size_t> finite_atoms() const;

  /// Per-atom condition numbers, filled in by field_inverse.
  const std::vector<double>& condition_numbers() const noexcept { return condition_; }
  void set_condition_numbers(std::vector<double> c) { condition_ = std::move(c); }

  double max_abs_difference(const MatrixField& other) const;

 private:
  SpacePtr space_;
  std::vector<std::optional<Matrix>> blocks_;
  std::vector<double> condition_;
};

/// Decomposition of a field in upper-triangular constant-diagonal form:
/// block = phi * I + strict_upper on every finite atom.
struct SITriangularForm {
  MatrixField base;
  std::vector<std::optional<Complex>> diagonal;
  std::vector<std::optional<Matrix>> strict_upper;

  Complex phi(std::size_t i) const;
  const Matrix& nilpotent(std::size_t i) const;
  MatrixField reconstruct() const;
};

SITriangularForm validate_si_form(const MatrixField& field, const Tolerances& tol = {});

MatrixField field_mul(const MatrixField& a, const MatrixField& b);
MatrixField field_add(const MatrixField& a, const MatrixField& b);
MatrixField field_sub(const MatrixField& a, const MatrixField& b);
MatrixField field_scale(const MatrixField& a, Complex s);
MatrixField field_adjoint(const MatrixField& a);
MatrixField field_inverse(const MatrixField& x, const Tolerances& tol = {});

/// m-fold block-diagonal copy of every block (copy-major layout).
MatrixField amplify(const MatrixField& t, int m);

}  // namespace sid
