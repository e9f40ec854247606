#include "sid/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sid/error.hpp"

namespace sid {

int ClassCommutant::predicted_dimension() const {
  if (full_dimension) return *full_dimension;
  int d = 0;
  for (const auto& g : groups) d += g.coupled_dimension();
  return d;
}

int CommutantStructure::total_dimension() const {
  int d = 0;
  for (const auto& c : classes) d += c.predicted_dimension();
  return d;
}

double spectral_threshold(const std::vector<Complex>& values, const Tolerances& tol) {
  double max_abs = 0.0;
  for (const Complex& v : values) max_abs = std::max(max_abs, std::abs(v));
  return tol.spec * (1.0 + max_abs);
}

std::vector<int> cluster_spectral_values(const std::vector<Complex>& values,
                                         const Tolerances& tol) {
  const std::size_t count = values.size();
  const double threshold = spectral_threshold(values, tol);
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double d = std::abs(values[i] - values[j]);
      if (d <= threshold) {
        parent[find(j)] = find(i);
      } else if (d <= 10.0 * threshold) {
        throw Error(ErrorKind::SpectralClusteringAmbiguous,
                    "spectral values differ by " + std::to_string(d) +
                        ", inside the ambiguity band",
                    {}, d);
      }
    }
  }
  std::vector<int> ids(count, -1);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      ids[i] = static_cast<int>(roots.size()) - 1;
    } else {
      ids[i] = static_cast<int>(it - roots.begin());
    }
  }
  return ids;
}

Matrix direct_sum(const std::vector<Matrix>& blocks) {
  Eigen::Index total = 0;
  for (const Matrix& b : blocks) total += b.rows();
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index offset = 0;
  for (const Matrix& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

namespace {

std::vector<Matrix> sylvester_kernel(const Matrix& t, const Tolerances& tol) {
  const Eigen::Index n = t.rows();
  if (n > tol.max_dim)
    throw Error(ErrorKind::DimensionTooLarge,
                "Sylvester solve of size " + std::to_string(n * n) + " exceeds the configured cap",
                {}, static_cast<double>(n));
  const Matrix op = linalg::sylvester_operator(t, t);
  const Matrix kernel = linalg::nullspace(op, tol.null);
  std::vector<Matrix> basis;
  basis.reserve(kernel.cols());
  for (Eigen::Index c = 0; c < kernel.cols(); ++c)
    basis.push_back(Eigen::Map<const Matrix>(kernel.col(c).data(), n, n));
  return basis;
}

}  // namespace

CommutantBasis fiber_commutant(const Matrix& block, const Tolerances& tol) {
  if (block.rows() != block.cols())
    throw Error(ErrorKind::InvalidInput, "fiber_commutant needs a square block");
  CommutantBasis out;
  out.basis = sylvester_kernel(block, tol);
  for (const Matrix& b : out.basis)
    out.max_residual = std::max(out.max_residual, (block * b - b * block).norm());
  return out;
}

std::vector<Matrix> coupled_commutant(const std::vector<Matrix>& blocks, const Tolerances& tol) {
  return sylvester_kernel(direct_sum(blocks), tol);
}

CommutantStructure field_commutant_structure(const MatrixField& t, const Tolerances& tol,
                                             bool full_solve) {
  const SITriangularForm form = validate_si_form(t, tol);
  const std::vector<std::size_t> finite = t.finite_atoms();
  std::vector<Complex> phis;
  for (std::size_t i : finite) phis.push_back(form.phi(i));
  const std::vector<int> ids = cluster_spectral_values(phis, tol);

  CommutantStructure out;
  for (std::size_t k = 0; k < finite.size(); ++k) {
    const auto c = static_cast<std::size_t>(ids[k]);
    if (c == out.classes.size()) out.classes.push_back({});
    out.classes[c].spectral.atoms.push_back(finite[k]);
  }
  for (ClassCommutant& cc : out.classes) {
    Complex sum{0.0, 0.0};
    for (std::size_t i : cc.spectral.atoms) sum += form.phi(i);
    cc.spectral.phi = sum / static_cast<double>(cc.spectral.atoms.size());

    for (std::size_t i : cc.spectral.atoms) {
      const Matrix& b = t.block(i);
      auto same = std::find_if(cc.groups.begin(), cc.groups.end(), [&](const IdenticalGroup& g) {
        const Matrix& rep = t.block(g.atoms.front());
        return rep.rows() == b.rows() && rep == b;
      });
      if (same != cc.groups.end()) {
        same->atoms.push_back(i);
      } else {
        IdenticalGroup g;
        g.atoms.push_back(i);
        g.fiber = fiber_commutant(b, tol);
        g.fiber.atom = i;
        cc.groups.push_back(std::move(g));
      }
    }
    if (full_solve && cc.spectral.atoms.size() > 1) {
      std::vector<Matrix> blocks;
      for (std::size_t i : cc.spectral.atoms) blocks.push_back(t.block(i));
      cc.full_basis = coupled_commutant(blocks, tol);
      cc.full_dimension = static_cast<int>(cc.full_basis.size());
    }
  }
  return out;
}

bool verify_commuting_triangular_form(const SITriangularForm& t, const MatrixField& x, const Tolerances& tol) {
  if (!t.base.space()->same_as(*x.space()))
    throw Error(ErrorKind::SpaceMismatch, "fields live on different spaces");
  for (std::size_t i : x.finite_atoms()) {
    const Matrix& tb = t.base.block(i);
    const Matrix& xb = x.block(i);
    const double residual = (tb * xb - xb * tb).norm();
    if (residual > tol.commute * std::max(1.0, tb.norm()) * std::max(1.0, xb.norm()))
      return false;
    const double scale = tol.diag * std::max(1.0, xb.norm());
    if (!linalg::is_upper_triangular(xb, scale)) return false;
    const Complex mean = xb.diagonal().mean();
    if ((xb.diagonal().array() - mean).abs().maxCoeff() > scale) return false;
  }
  return true;
}

}  // namespace sid
