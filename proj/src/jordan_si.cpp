#include "sid/jordan_si.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sid/error.hpp"

namespace sid {

namespace {

// Relative rank threshold used by the eigenvalue/rank oracle.
constexpr double kOracleRankRelative = 1e-10;
// Scale of the backward error assumed when widening the clustering radius for
// nonnormal blocks: eigenvalues of a perturbed n x n Jordan block move by
// roughly (error)^(1/n).
constexpr double kNonnormalBackwardError = 1e-8;

double superdiagonal_threshold(const Matrix& block, const Tolerances& tol) {
  return tol.zero * (1.0 + block.norm());
}

}  // namespace

Matrix JordanReport::jordan_matrix() const {
  int n = 0;
  for (int s : block_sizes) n += s;
  Matrix j = eigenvalue * Matrix::Identity(n, n);
  int offset = 0;
  for (int s : block_sizes) {
    for (int k = 0; k + 1 < s; ++k) j(offset + k, offset + k + 1) = 1.0;
    offset += s;
  }
  return j;
}

JordanReport jordan_similarity(const Matrix& block, const Tolerances& tol) {
  const Eigen::Index n = block.rows();
  if (block.cols() != n || n == 0)
    throw Error(ErrorKind::InvalidInput, "jordan_similarity needs a nonempty square block");
  const double scale = std::max(1.0, block.norm());
  if (!linalg::is_upper_triangular(block, tol.diag * scale))
    throw Error(ErrorKind::NotUpperTriangular, "block is not upper triangular");
  const Complex alpha = block.diagonal().mean();
  if ((block.diagonal().array() - alpha).abs().maxCoeff() > tol.diag * scale)
    throw Error(ErrorKind::DiagonalNotConstant, "block diagonal is not constant");
  const double zero = superdiagonal_threshold(block, tol);
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (std::abs(block(i, i + 1)) <= zero)
      throw Error(ErrorKind::CriterionViolated,
                  "superdiagonal entry (" + std::to_string(i) + "," + std::to_string(i + 1) +
                      ") vanishes",
                  {}, std::abs(block(i, i + 1)));

  const Matrix nil = Matrix(block.triangularView<Eigen::StrictlyUpper>());
  // Last column is e_n; free entries are zero. Each earlier column is N times
  // the next, which gives x_{i-1,i-1} = t_{i-1,i} x_{ii} on the diagonal.
  Matrix x = Matrix::Zero(n, n);
  x(n - 1, n - 1) = 1.0;
  for (Eigen::Index col = n - 1; col > 0; --col) x.col(col - 1) = nil * x.col(col);

  JordanReport report;
  report.eigenvalue = alpha;
  report.block_sizes = {static_cast<int>(n)};
  report.is_single_block = true;
  report.similarity = x;
  report.residual = (block * x - x * report.jordan_matrix()).norm();
  return report;
}

JordanReport jordan_structure(const Matrix& block, const Tolerances& tol) {
  const Eigen::Index n = block.rows();
  if (block.cols() != n || n == 0)
    throw Error(ErrorKind::InvalidInput, "jordan_structure needs a nonempty square block");
  const Complex alpha = block.trace() / static_cast<double>(n);
  const Matrix nil = block - alpha * Matrix::Identity(n, n);
  const double tau = tol.zero * (1.0 + block.norm());

  // Kernel flag K_1 ⊂ K_2 ⊂ ... of N, each step solving (I - K K^*) N x = 0.
  std::vector<Matrix> kernels{Matrix(n, 0)};
  while (kernels.back().cols() < n) {
    const Matrix& k = kernels.back();
    const Matrix proj = Matrix::Identity(n, n) - k * k.adjoint();
    Matrix next = linalg::nullspace_absolute(proj * nil, tau);
    if (next.cols() <= k.cols())
      throw Error(ErrorKind::IllConditionedSpectrum,
                  "block does not have a single eigenvalue at the working tolerance");
    kernels.push_back(std::move(next));
  }
  const int depth = static_cast<int>(kernels.size()) - 1;
  auto dim = [&](int j) { return static_cast<int>(kernels[j].cols()); };
  auto at_least = [&](int s) { return s > depth ? 0 : dim(s) - dim(s - 1); };

  struct Chain {
    int size;
    Vector head;
  };
  std::vector<Chain> chains;
  for (int s = depth; s >= 1; --s) {
    const int exact = at_least(s) - at_least(s + 1);
    if (exact == 0) continue;
    // Directions of K_s independent of K_{s-1} and of the longer chains.
    Matrix span_cols(n, kernels[s - 1].cols() + static_cast<Eigen::Index>(chains.size()));
    span_cols.leftCols(kernels[s - 1].cols()) = kernels[s - 1];
    Eigen::Index c = kernels[s - 1].cols();
    for (const Chain& ch : chains) {
      Vector v = ch.head;
      for (int p = 0; p < ch.size - s; ++p) v = nil * v;
      span_cols.col(c++) = v;
    }
    const Matrix basis = linalg::orthonormal_span(span_cols, tau);
    const Matrix residual_part =
        (Matrix::Identity(n, n) - basis * basis.adjoint()) * kernels[s];
    Eigen::JacobiSVD<Matrix> svd(residual_part, Eigen::ComputeThinU);
    if (svd.singularValues().size() < exact || svd.singularValues()(exact - 1) <= tau)
      throw Error(ErrorKind::IllConditionedSpectrum, "Jordan chain extraction lost rank");
    Matrix heads = svd.matrixU().leftCols(exact);
    linalg::normalize_column_phases(heads);
    for (int g = 0; g < exact; ++g) chains.push_back({s, heads.col(g)});
  }

  Matrix x(n, n);
  Eigen::Index col = 0;
  JordanReport report;
  report.eigenvalue = alpha;
  for (const Chain& ch : chains) {
    Vector v = ch.head;
    for (int p = ch.size - 1; p >= 0; --p) {
      x.col(col + p) = v;
      v = nil * v;
    }
    col += ch.size;
    report.block_sizes.push_back(ch.size);
  }
  report.is_single_block = chains.size() == 1;
  report.similarity = x;
  report.residual = (block * x - x * report.jordan_matrix()).norm();
  return report;
}

Matrix commuting_idempotent_witness(const Matrix& block, const Tolerances& tol) {
  const JordanReport jr = jordan_structure(block, tol);
  if (jr.is_single_block)
    throw Error(ErrorKind::CriterionViolated, "a single Jordan block has no nontrivial idempotent");
  const Matrix& x = *jr.similarity;
  const Eigen::Index n = x.rows();
  Matrix e = Matrix::Zero(n, n);
  for (int k = 0; k < jr.block_sizes.front(); ++k) e(k, k) = 1.0;
  return x * e * x.fullPivLu().inverse();
}

SIVerdict si_test_superdiagonal(const SITriangularForm& form, const Tolerances& tol) {
  const auto& field = form.base;
  SIVerdict verdict;
  verdict.per_atom.resize(field.size());
  for (std::size_t i : field.finite_atoms()) {
    const Matrix& b = field.block(i);
    const double zero = superdiagonal_threshold(b, tol);
    bool si = true;
    for (Eigen::Index k = 0; k + 1 < b.rows(); ++k)
      if (std::abs(b(k, k + 1)) <= zero) si = false;
    verdict.per_atom[i] = si;
    if (!si) {
      verdict.overall = false;
      verdict.witnesses.emplace(i, commuting_idempotent_witness(b, tol));
    }
  }
  return verdict;
}

bool si_test_general(const Matrix& block, const Tolerances& tol) {
  const Eigen::Index n = block.rows();
  if (block.cols() != n || n == 0)
    throw Error(ErrorKind::InvalidInput, "si_test_general needs a nonempty square block");
  if (n == 1) return true;

  Eigen::ComplexEigenSolver<Matrix> solver(block, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::IllConditionedSpectrum, "eigenvalue iteration did not converge");
  const Vector eig = solver.eigenvalues();
  const Complex alpha = block.trace() / static_cast<double>(n);
  const Matrix nil = block - alpha * Matrix::Identity(n, n);

  const double radius = (eig.array() - alpha).abs().maxCoeff();
  const double spectral_radius = eig.cwiseAbs().maxCoeff();
  const double nonnormal =
      std::pow(kNonnormalBackwardError * (1.0 + block.norm()) *
                   std::pow(1.0 + nil.norm(), static_cast<double>(n - 1)),
               1.0 / static_cast<double>(n));
  const double cluster = std::max(tol.eig * spectral_radius, nonnormal);
  if (radius > 10.0 * cluster) return false;
  if (radius > cluster)
    throw Error(ErrorKind::IllConditionedSpectrum,
                "eigenvalue spread " + std::to_string(radius) + " is inside the ambiguity band",
                {}, radius);

  const int rank = linalg::rank_above(nil, kOracleRankRelative * (1.0 + block.norm()));
  return rank == n - 1;
}

}  // namespace sid
