#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace sid {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace linalg {

double frobenius(const Matrix& a);

/// Singular values in descending order.
Eigen::VectorXd singular_values(const Matrix& a);

/// Number of singular values strictly above `relative * sigma_max`.
int numerical_rank(const Matrix& a, double relative);

/// Same, with an absolute threshold.
int rank_above(const Matrix& a, double absolute);

/// 2-norm condition number; +inf for a singular matrix.
double condition_number(const Matrix& a);

/// Orthonormal basis (columns) of the right nullspace, using singular values
/// at or below `relative * sigma_max`. A zero matrix yields the identity.
Matrix nullspace(const Matrix& a, double relative);

/// Right nullspace from singular values at or below an absolute threshold.
Matrix nullspace_absolute(const Matrix& a, double absolute);

/// Orthonormal basis of the column span, dropping directions with singular
/// value at or below `absolute`.
Matrix orthonormal_span(const Matrix& columns, double absolute);

/// Rotates each column so its first entry of maximal modulus is real positive.
void normalize_column_phases(Matrix& columns);

/// Kronecker product kron(a, b).
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major vec: the Sylvester map X -> A X - X B as an (n*m) x (n*m)
/// matrix acting on vec(X).
Matrix sylvester_operator(const Matrix& a, const Matrix& b);

bool is_upper_triangular(const Matrix& a, double absolute);

}  // namespace linalg
}  // namespace sid
