#pragma once

#include <vector>

#include "sid/linalg.hpp"

namespace sid {

/// Matrix-coefficient polynomial sum_k C_k N^k truncated at N^n, with every
/// C_k of size m x m. For a strongly irreducible fiber T = alpha I + N this
/// is exactly the amplified commutant M_m({T}').
using Series = std::vector<Matrix>;

/// M_m({T(λ)}') for one atom, given the nilpotent part N of an upper-triangular
/// block with nonvanishing superdiagonal.
///
/// Layouts: copy-major puts copy a, position i at index a*n + i (what
/// amplify() produces); position-major puts it at i*m + a.
class CommutantAlgebra {
 public:
  explicit CommutantAlgebra(const Matrix& nilpotent);

  int n() const noexcept { return static_cast<int>(powers_.size()); }
  const Matrix& power(int k) const { return powers_.at(static_cast<std::size_t>(k)); }

  /// Coefficients of a copy-major mn x mn matrix. `residual` receives
  /// ||M - expand(result)||_F; a large value means M is not in the algebra.
  Series decompose(const Matrix& copy_major, int m, double* residual = nullptr) const;
  Matrix expand(const Series& s) const;
  Matrix expand_position_major(const Series& s) const;

  Series identity(int m) const;
  Series constant(const Matrix& c) const;
  Series multiply(const Series& a, const Series& b) const;
  /// Throws SingularCertificate when the constant term is singular.
  Series inverse(const Series& a) const;
  Series conjugate(const Series& x, const Series& q, const Series& x_inv) const;

  /// Permutation matrix P with (P v)[i*m + a] = v[a*n + i].
  Matrix copy_to_position(int m) const;

 private:
  std::vector<Matrix> powers_;
};

/// Restriction of every coefficient to rows/cols [first, first + size).
Series corner(const Series& s, int first, int size);
/// Embeds a corner series back into m x m coefficients, identity on the
/// leading `first` copies.
Series embed_corner(const Series& s, int first, int m);

}  // namespace sid
