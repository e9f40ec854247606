#include "sid/commutant_algebra.hpp"

#include "sid/error.hpp"

namespace sid {

CommutantAlgebra::CommutantAlgebra(const Matrix& nilpotent) {
  const Eigen::Index n = nilpotent.rows();
  if (n == 0 || nilpotent.cols() != n)
    throw Error(ErrorKind::InvalidInput, "commutant algebra needs a square nilpotent part");
  powers_.push_back(Matrix::Identity(n, n));
  for (Eigen::Index k = 1; k < n; ++k) powers_.push_back(powers_.back() * nilpotent);
  for (Eigen::Index k = 1; k < n; ++k)
    if (powers_[k](0, k) == Complex(0.0, 0.0))
      throw Error(ErrorKind::CriterionViolated,
                  "fiber is not strongly irreducible; commutant is not a truncated polynomial ring");
}

Series CommutantAlgebra::decompose(const Matrix& copy_major, int m, double* residual) const {
  const int nn = n();
  if (copy_major.rows() != m * nn || copy_major.cols() != m * nn)
    throw Error(ErrorKind::DimensionMismatch, "matrix does not match the amplified fiber");
  // First row of every n x n block determines the coefficients: entry (0, j)
  // of sum_k C_k[a,b] N^k is triangular in (k, j) with pivot (N^j)(0, j).
  Series out(nn, Matrix::Zero(m, m));
  for (int j = 0; j < nn; ++j) {
    Matrix r(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) r(a, b) = copy_major(a * nn, b * nn + j);
    for (int k = 0; k < j; ++k) r -= powers_[k](0, j) * out[k];
    out[j] = r / powers_[j](0, j);
  }
  if (residual) *residual = (copy_major - expand(out)).norm();
  return out;
}

Matrix CommutantAlgebra::expand(const Series& s) const {
  const Eigen::Index m = s.front().rows();
  const int nn = n();
  Matrix out = Matrix::Zero(m * nn, m * nn);
  for (int k = 0; k < nn; ++k) out += linalg::kron(s[k], powers_[k]);
  return out;
}

Matrix CommutantAlgebra::expand_position_major(const Series& s) const {
  const Eigen::Index m = s.front().rows();
  const int nn = n();
  Matrix out = Matrix::Zero(m * nn, m * nn);
  for (int k = 0; k < nn; ++k) out += linalg::kron(powers_[k], s[k]);
  return out;
}

Series CommutantAlgebra::identity(int m) const { return constant(Matrix::Identity(m, m)); }

Series CommutantAlgebra::constant(const Matrix& c) const {
  Series s(n(), Matrix::Zero(c.rows(), c.cols()));
  s[0] = c;
  return s;
}

Series CommutantAlgebra::multiply(const Series& a, const Series& b) const {
  const int nn = n();
  Series out(nn, Matrix::Zero(a.front().rows(), b.front().cols()));
  for (int i = 0; i < nn; ++i)
    for (int j = 0; i + j < nn; ++j) out[i + j] += a[i] * b[j];
  return out;
}

Series CommutantAlgebra::inverse(const Series& a) const {
  const int nn = n();
  Eigen::FullPivLU<Matrix> lu(a[0]);
  if (!lu.isInvertible())
    throw Error(ErrorKind::SingularCertificate, "constant term of the series is singular");
  Series out(nn);
  out[0] = lu.inverse();
  for (int k = 1; k < nn; ++k) {
    Matrix acc = Matrix::Zero(a[0].rows(), a[0].cols());
    for (int j = 1; j <= k; ++j) acc += a[j] * out[k - j];
    out[k] = -out[0] * acc;
  }
  return out;
}

Series CommutantAlgebra::conjugate(const Series& x, const Series& q, const Series& x_inv) const {
  return multiply(multiply(x, q), x_inv);
}

Matrix CommutantAlgebra::copy_to_position(int m) const {
  const int nn = n();
  Matrix p = Matrix::Zero(m * nn, m * nn);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < nn; ++i) p(i * m + a, a * nn + i) = 1.0;
  return p;
}

Series corner(const Series& s, int first, int size) {
  Series out;
  out.reserve(s.size());
  for (const Matrix& c : s) out.push_back(c.block(first, first, size, size));
  return out;
}

Series embed_corner(const Series& s, int first, int m) {
  Series out;
  out.reserve(s.size());
  const int size = m - first;
  for (std::size_t k = 0; k < s.size(); ++k) {
    Matrix c = Matrix::Zero(m, m);
    if (k == 0) c.topLeftCorner(first, first).setIdentity();
    c.block(first, first, size, size) = s[k];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sid
