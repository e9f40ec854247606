#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sid/idempotent_reduction.hpp"

namespace sid {

/// Integer-valued function on the finite spectrum points: the image of an
/// idempotent under the normalized trace.
struct K0Class {
  std::vector<Complex> support;
  std::vector<long long> values;  // aligned with `support`
  double max_rounding = 0.0;      // largest distance to the rounded integer

  long long at(std::size_t k) const { return values.at(k); }
  bool operator==(const K0Class& other) const { return values == other.values; }
};

/// An infinite atom: its class contributes the zero group.
struct ZeroContribution {
  std::string atom;
  std::optional<int> dimension_class;  // empty when the atom is in no finite class
  std::optional<Complex> phi;
};

/// K0({T}') presented as Z^k over the distinct finite spectrum points.
struct K0Descriptor {
  std::vector<Complex> spectrum_support;
  std::vector<int> point_dimensions;     // fiber dimensions meeting each point
  std::vector<K0Class> generators;       // indicator of each point
  std::vector<ZeroContribution> zero_contributions;

  int rank() const noexcept { return static_cast<int>(spectrum_support.size()); }
  std::string shape() const;
};

/// Spectrum points of the finite atoms and, per finite atom, its point index.
struct SpectrumPoints {
  std::vector<Complex> points;
  std::vector<std::optional<int>> atom_point;
};
SpectrumPoints spectrum_points(const MatrixField& t, const Tolerances& tol = {});

/// value(t) = sum over atoms at t of Tr(P(λ)) / n(λ). Throws NonIntegerClass
/// outside the integer gate and InconsistentTrace when an atom's trace
/// disagrees with its rank.
K0Class trace_class(const IdempotentField& p, const Tolerances& tol = {});

K0Descriptor k0_descriptor(const MatrixField& t, const Tolerances& tol = {});

/// Throws DifferentBaseOperator when p and q are not over the same T.
bool k0_equal(const IdempotentField& p, const IdempotentField& q, const Tolerances& tol = {});

}  // namespace sid
