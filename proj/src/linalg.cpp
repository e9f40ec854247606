#include "sid/linalg.hpp"

#include <cmath>
#include <limits>

namespace sid::linalg {

double frobenius(const Matrix& a) { return a.norm(); }

Eigen::VectorXd singular_values(const Matrix& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Matrix& a, double relative) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold = relative * s(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold) ++r;
  return r;
}

int rank_above(const Matrix& a, double absolute) {
  const Eigen::VectorXd s = singular_values(a);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > absolute) ++r;
  return r;
}

double condition_number(const Matrix& a) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix nullspace(const Matrix& a, double relative) {
  const Eigen::Index cols = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (smax == 0.0) return Matrix::Identity(cols, cols);
  const double threshold = relative * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold) ++rank;
  Matrix basis = svd.matrixV().rightCols(cols - rank);
  normalize_column_phases(basis);
  return basis;
}

Matrix nullspace_absolute(const Matrix& a, double absolute) {
  const Eigen::Index cols = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > absolute) ++rank;
  Matrix basis = svd.matrixV().rightCols(cols - rank);
  normalize_column_phases(basis);
  return basis;
}

Matrix orthonormal_span(const Matrix& columns, double absolute) {
  if (columns.cols() == 0) return Matrix(columns.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > absolute) ++rank;
  return svd.matrixU().leftCols(rank);
}

void normalize_column_phases(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      // strict comparison with slack keeps the choice stable under rounding
      const double v = std::abs(columns(i, j));
      if (v > best_abs * (1.0 + 1e-12)) {
        best_abs = v;
        best = i;
      }
    }
    if (best_abs > 0.0) {
      const Complex z = columns(best, j);
      columns.col(j) *= std::conj(z) / std::abs(z);
      columns(best, j) = Complex(std::abs(z), 0.0);
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix sylvester_operator(const Matrix& a, const Matrix& b) {
  // vec(A X) = (I kron A) vec(X); vec(X B) = (B^T kron I) vec(X)
  const Matrix ia = kron(Matrix::Identity(b.rows(), b.rows()), a);
  const Matrix bi = kron(b.transpose(), Matrix::Identity(a.rows(), a.rows()));
  return ia - bi;
}

bool is_upper_triangular(const Matrix& a, double absolute) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = j + 1; i < a.rows(); ++i)
      if (std::abs(a(i, j)) > absolute) return false;
  return true;
}

}  // namespace sid::linalg
