#include "sid/idempotent_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sid/error.hpp"

namespace sid {

namespace {

const std::string& label_of(const MatrixField& f, std::size_t i) {
  return f.space()->atom(i).label;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return linalg::singular_values(a)(0);
}

int infer_amplification(const MatrixField& q, const MatrixField& base) {
  if (!q.space()->same_base(*base.space()))
    throw Error(ErrorKind::DifferentBaseOperator, "idempotent and operator live on different spaces");
  const int qa = q.space()->amplification();
  const int ba = base.space()->amplification();
  if (qa % ba != 0)
    throw Error(ErrorKind::DimensionMismatch, "idempotent is not over an amplification of the operator");
  return qa / ba;
}

// Decomposes every finite block of a copy-major field over the algebras.
std::vector<std::optional<Series>> decompose_field(
    const MatrixField& f, int m, const std::vector<std::optional<CommutantAlgebra>>& algebras,
    const Tolerances& tol) {
  std::vector<std::optional<Series>> out(f.size());
  for (std::size_t i : f.finite_atoms()) {
    double residual = 0.0;
    out[i] = algebras[i]->decompose(f.block(i), m, &residual);
    const double scale = std::max(1.0, linalg::frobenius(f.block(i)));
    if (residual > tol.commute * scale)
      throw Error(ErrorKind::NotInCommutant, "block is not in the amplified commutant",
                  label_of(f, i), residual);
  }
  return out;
}

SpacePtr amplified_space(const MatrixField& base, int m) { return base.space()->amplified(m); }

SimilarityCertificate make_certificate(const MatrixField& base, int m,
                                       const std::vector<std::optional<CommutantAlgebra>>& algebras,
                                       const std::vector<std::optional<Series>>& x,
                                       const std::vector<std::optional<Series>>& x_inv,
                                       std::vector<LogEntry> log, const Tolerances& tol) {
  SpacePtr space = amplified_space(base, m);
  std::vector<std::optional<Matrix>> xb(base.size()), xib(base.size());
  for (std::size_t i : base.finite_atoms()) {
    xb[i] = algebras[i]->expand(*x[i]);
    xib[i] = algebras[i]->expand(*x_inv[i]);
  }
  SimilarityCertificate cert{MatrixField(space, std::move(xb)), MatrixField(space, std::move(xib)),
                             amplify(base, m), {}, std::move(log), 0.0, 0.0};
  cert.condition.assign(base.size(), 1.0);
  for (std::size_t i : base.finite_atoms()) {
    const Matrix& xm = cert.x.block(i);
    const Matrix& t = cert.reference.block(i);
    const double kappa = linalg::condition_number(xm);
    cert.condition[i] = kappa;
    if (!(kappa <= tol.kappa_max))
      throw Error(ErrorKind::SingularCertificate, "certificate exceeds the conditioning cap",
                  label_of(base, i), kappa);
    const double tn = std::max(1.0, spectral_norm(t));
    const double xn = std::max(1.0, spectral_norm(xm));
    cert.commutation_residual =
        std::max(cert.commutation_residual, (t * xm - xm * t).norm() / (tn * xn));
    const Matrix id = Matrix::Identity(xm.rows(), xm.cols());
    cert.inverse_residual =
        std::max(cert.inverse_residual, (xm * cert.x_inv.block(i) - id).norm());
  }
  cert.x.set_condition_numbers(cert.condition);
  return cert;
}

// Log factor built per atom from a function of the algebra; identity on
// infinite atoms is implicit since they carry no block.
MatrixField factor_field(const MatrixField& base, int m,
                         const std::vector<std::optional<CommutantAlgebra>>& algebras,
                         const std::function<Matrix(std::size_t, const CommutantAlgebra&)>& make) {
  return MatrixField::from_blocks(amplified_space(base, m), [&](std::size_t i) {
    return make(i, *algebras[i]);
  });
}

Matrix nearest_diagonal_projection(const Matrix& c) {
  Matrix d = Matrix::Zero(c.rows(), c.cols());
  for (Eigen::Index a = 0; a < c.rows(); ++a) d(a, a) = std::abs(c(a, a)) > 0.5 ? 1.0 : 0.0;
  return d;
}

double series_distance(const Series& a, const Series& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

IdempotentField IdempotentField::make(MatrixField q, MatrixField base, const Tolerances& tol) {
  const int m = infer_amplification(q, base);
  const MatrixField t = amplify(base, m);
  double bound = 0.0;
  for (std::size_t i : q.finite_atoms()) {
    const Matrix& b = q.block(i);
    if (b.rows() != t.block(i).rows())
      throw Error(ErrorKind::DimensionMismatch, "idempotent block does not match the amplified fiber",
                  label_of(q, i));
    const double qn = linalg::frobenius(b);
    const double idem = (b * b - b).norm();
    if (idem > tol.idem * (1.0 + qn * qn))
      throw Error(ErrorKind::NotIdempotent, "block is not idempotent", label_of(q, i), idem);
    const Matrix& tb = t.block(i);
    const double comm = (tb * b - b * tb).norm();
    if (comm > tol.commute * std::max(1.0, linalg::frobenius(tb)) * std::max(1.0, qn))
      throw Error(ErrorKind::NotInCommutant, "idempotent does not commute with the operator",
                  label_of(q, i), comm);
    bound = std::max(bound, spectral_norm(b));
  }
  return IdempotentField{std::move(q), std::move(base), m, bound};
}

SimilarityCertificate SimilarityCertificate::compose_after(const SimilarityCertificate& first) const {
  SimilarityCertificate out{field_mul(x, first.x), field_mul(first.x_inv, x_inv), reference,
                            {}, first.construction_log, 0.0, 0.0};
  out.construction_log.insert(out.construction_log.end(), construction_log.begin(),
                              construction_log.end());
  out.condition.assign(x.size(), 1.0);
  for (std::size_t i : out.x.finite_atoms()) {
    const Matrix& xm = out.x.block(i);
    const Matrix& t = reference.block(i);
    out.condition[i] = linalg::condition_number(xm);
    const double tn = std::max(1.0, spectral_norm(t));
    const double xn = std::max(1.0, spectral_norm(xm));
    out.commutation_residual =
        std::max(out.commutation_residual, (t * xm - xm * t).norm() / (tn * xn));
    out.inverse_residual = std::max(
        out.inverse_residual,
        (xm * out.x_inv.block(i) - Matrix::Identity(xm.rows(), xm.cols())).norm());
  }
  out.x.set_condition_numbers(out.condition);
  return out;
}

SimilarityCertificate SimilarityCertificate::inverse() const {
  SimilarityCertificate out{x_inv, x, reference, {}, {}, commutation_residual, inverse_residual};
  for (auto it = construction_log.rbegin(); it != construction_log.rend(); ++it)
    out.construction_log.push_back({it->name + "^-1", it->note, field_inverse(it->factor)});
  out.condition.assign(x.size(), 1.0);
  for (std::size_t i : x_inv.finite_atoms()) out.condition[i] = linalg::condition_number(x_inv.block(i));
  out.x.set_condition_numbers(out.condition);
  return out;
}

PointwiseReduction reduce_pointwise(const Matrix& p, const Tolerances& tol) {
  if (p.rows() != p.cols()) throw Error(ErrorKind::DimensionMismatch, "idempotent must be square");
  const Eigen::Index m = p.rows();
  const double pn = linalg::frobenius(p);
  const double idem = m == 0 ? 0.0 : (p * p - p).norm();
  if (idem > tol.idem * (1.0 + pn * pn))
    throw Error(ErrorKind::NotIdempotent, "matrix is not idempotent", {}, idem);

  PointwiseReduction out;
  out.rank = linalg::numerical_rank(p, tol.rank);
  out.norm_bound = 1.0 + spectral_norm(p);
  const Eigen::Index r = out.rank;
  out.projection = Matrix::Zero(m, m);
  out.projection.topLeftCorner(r, r).setIdentity();
  if (r == 0 || r == m) {
    out.y = out.y_inv = out.unitary = out.shear = Matrix::Identity(m, m);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
  Matrix range = svd.matrixU().leftCols(r);
  Matrix complement = svd.matrixU().rightCols(m - r);
  linalg::normalize_column_phases(range);
  linalg::normalize_column_phases(complement);
  Matrix w(m, m);
  w << range, complement;
  out.unitary = w.adjoint();
  const Matrix coupling = range.adjoint() * p * complement;
  out.shear = Matrix::Identity(m, m);
  out.shear.topRightCorner(r, m - r) = coupling;
  Matrix shear_inv = Matrix::Identity(m, m);
  shear_inv.topRightCorner(r, m - r) = -coupling;
  out.y = out.shear * out.unitary;
  out.y_inv = w * shear_inv;
  return out;
}

int series_rank(const Series& q, const Tolerances& tol) {
  return linalg::numerical_rank(q.front(), tol.rank);
}

std::vector<std::optional<CommutantAlgebra>> commutant_algebras(const MatrixField& base,
                                                                const Tolerances& tol) {
  const SITriangularForm form = validate_si_form(base, tol);
  std::vector<std::optional<CommutantAlgebra>> out(base.size());
  for (std::size_t i : base.finite_atoms()) {
    const Matrix& b = base.block(i);
    const double zero = tol.zero * (1.0 + b.norm());
    for (Eigen::Index k = 0; k + 1 < b.rows(); ++k)
      if (std::abs(b(k, k + 1)) <= zero)
        throw Error(ErrorKind::CriterionViolated, "fiber is not strongly irreducible",
                    label_of(base, i), std::abs(b(k, k + 1)));
    try {
      out[i].emplace(form.nilpotent(i));
    } catch (const Error& e) {
      throw Error(e.kind(), "fiber is not strongly irreducible", label_of(base, i));
    }
  }
  return out;
}

SeriesReduction canonicalize_series(const CommutantAlgebra& algebra, const Series& q,
                                    const Tolerances& tol) {
  const int n = algebra.n();
  const Eigen::Index m = q.front().rows();
  SeriesReduction out;

  // Pointwise reduction of the constant term, applied uniformly to all
  // positions (X2 = I_n (x) Y in the position-major layout).
  const PointwiseReduction red = reduce_pointwise(q.front(), tol);
  out.y = red.y;
  Series cur = algebra.conjugate(algebra.constant(red.y), q, algebra.constant(red.y_inv));

  // Stable sort of the diagonal, ones first.
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(red.projection(a, a)) > std::abs(red.projection(b, b));
  });
  out.permutation = Matrix::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) out.permutation(a, order[a]) = 1.0;
  cur = algebra.conjugate(algebra.constant(out.permutation), cur,
                          algebra.constant(out.permutation.adjoint()));
  out.projection = out.permutation * red.projection * out.permutation.adjoint();

  Series x = algebra.constant(out.permutation * red.y);

  // Shear sweep: with lower orders already cleared, idempotency forces C_k to
  // be off-diagonal with respect to P, and I + N^k (x) (2P - I) C_k removes it.
  const Matrix reflect = 2.0 * out.projection - Matrix::Identity(m, m);
  for (int k = 1; k < n; ++k) {
    const Matrix e = reflect * cur[k];
    out.sweep.push_back(e);
    Series step = algebra.identity(static_cast<int>(m));
    step[k] = e;
    const Series step_inv = algebra.inverse(step);
    cur = algebra.conjugate(step, cur, step_inv);
    x = algebra.multiply(step, x);
  }

  out.residual = (cur[0] - out.projection).cwiseAbs().maxCoeff();
  for (int k = 1; k < n; ++k)
    out.residual = std::max(out.residual, cur[k].cwiseAbs().maxCoeff());
  out.x = x;
  out.x_inv = algebra.inverse(x);
  return out;
}

Canonicalization canonicalize_in_commutant(const IdempotentField& q, const Tolerances& tol) {
  const MatrixField& base = q.base;
  const int m = q.m;
  const auto algebras = commutant_algebras(base, tol);
  const auto coeffs = decompose_field(q.field, m, algebras, tol);

  std::vector<std::optional<SeriesReduction>> reductions(base.size());
  std::vector<std::optional<Series>> xs(base.size()), xis(base.size());
  double residual = 0.0;
  int max_n = 1;
  for (std::size_t i : base.finite_atoms()) {
    reductions[i] = canonicalize_series(*algebras[i], *coeffs[i], tol);
    residual = std::max(residual, reductions[i]->residual);
    if (reductions[i]->residual > 1e-6)
      throw Error(ErrorKind::SingularCertificate, "canonical form not reached within the rounding gate",
                  label_of(base, i), reductions[i]->residual);
    xs[i] = reductions[i]->x;
    xis[i] = reductions[i]->x_inv;
    max_n = std::max(max_n, algebras[i]->n());
  }

  std::vector<LogEntry> log;
  log.push_back({"U1", "copy-major to position-major permutation",
                 factor_field(base, m, algebras, [&](std::size_t, const CommutantAlgebra& a) {
                   return a.copy_to_position(m);
                 })});
  log.push_back({"X2", "pointwise reduction of the leading block, repeated on every position",
                 factor_field(base, m, algebras, [&](std::size_t i, const CommutantAlgebra& a) {
                   return a.expand_position_major(a.constant(reductions[i]->y));
                 })});
  log.push_back({"U3", "reorder to nested supports",
                 factor_field(base, m, algebras, [&](std::size_t i, const CommutantAlgebra& a) {
                   return a.expand_position_major(a.constant(reductions[i]->permutation));
                 })});
  for (int k = 1; k < max_n; ++k) {
    log.push_back({"X3_" + std::to_string(k), "unipotent shear clearing block superdiagonal " + std::to_string(k),
                   factor_field(base, m, algebras, [&](std::size_t i, const CommutantAlgebra& a) {
                     Series s = a.identity(m);
                     if (k < a.n()) s[k] = reductions[i]->sweep[k - 1];
                     return a.expand_position_major(s);
                   })});
  }
  log.push_back({"U1*", "position-major back to copy-major",
                 factor_field(base, m, algebras, [&](std::size_t, const CommutantAlgebra& a) {
                   return Matrix(a.copy_to_position(m).transpose());
                 })});

  SimilarityCertificate cert = make_certificate(base, m, algebras, xs, xis, std::move(log), tol);

  MatrixField proj = MatrixField::from_blocks(amplified_space(base, m), [&](std::size_t i) {
    return algebras[i]->expand(algebras[i]->constant(reductions[i]->projection));
  });
  // Re-verify the rounded projection against the actual conjugate.
  const MatrixField conj = field_mul(field_mul(cert.x, q.field), cert.x_inv);
  residual = std::max(residual, conj.max_abs_difference(proj));
  if (residual > 1e-6)
    throw Error(ErrorKind::SingularCertificate, "conjugated idempotent is not the rounded projection",
                {}, residual);
  return Canonicalization{IdempotentField{std::move(proj), base, m, 1.0}, std::move(cert), residual};
}

RankProfile rank_profile(const IdempotentField& q, const Tolerances& tol) {
  RankProfile out;
  out.per_atom.assign(q.field.size(), std::nullopt);
  std::optional<int> first;
  for (std::size_t i : q.field.finite_atoms()) {
    const int n = q.field.space()->base_dim(i);
    const int r = linalg::numerical_rank(q.field.block(i), tol.rank);
    if (r % n != 0)
      throw Error(ErrorKind::RankNotMultipleOfN, "rank is not a multiple of the fiber dimension",
                  label_of(q.field, i), r);
    out.per_atom[i] = r / n;
    out.value_partition[r / n].push_back(i);
    if (!first) first = r / n;
    if (*first != r / n) out.is_constant = false;
  }
  return out;
}

std::vector<IdempotentField> standard_family(const MatrixField& base, int m) {
  std::vector<IdempotentField> out;
  SpacePtr space = amplified_space(base, m);
  for (int a = 0; a < m; ++a) {
    MatrixField f = MatrixField::from_blocks(space, [&](std::size_t i) {
      const Eigen::Index n = base.block(i).rows();
      Matrix e = Matrix::Zero(m, m);
      e(a, a) = 1.0;
      return linalg::kron(e, Matrix::Identity(n, n));
    });
    out.push_back(IdempotentField{std::move(f), base, m, 1.0});
  }
  return out;
}

std::vector<Series> minimal_pieces(const CommutantAlgebra& algebra,
                                   const std::vector<Series>& generators, int m,
                                   const Tolerances& tol, const std::string& atom) {
  // Depth-first descent: a piece of rank > 1 is split by the first generator
  // (or its complement) cutting it at an intermediate rank.
  std::vector<Series> done;
  std::vector<Series> stack{algebra.identity(m)};
  while (!stack.empty()) {
    Series e = std::move(stack.back());
    stack.pop_back();
    const int r = series_rank(e, tol);
    if (r <= 1) {
      if (r == 1) done.push_back(std::move(e));
      continue;
    }
    bool split = false;
    for (const Series& g : generators) {
      Series ge = algebra.multiply(g, e);
      const int rg = series_rank(ge, tol);
      if (rg > 0 && rg < r) {
        Series rest = e;
        for (std::size_t k = 0; k < rest.size(); ++k) rest[k] -= ge[k];
        stack.push_back(std::move(rest));
        stack.push_back(std::move(ge));
        split = true;
        break;
      }
    }
    if (!split)
      throw Error(ErrorKind::FamilyNotMaximal,
                  "no family element cuts a piece of rank " + std::to_string(r), atom, r);
  }
  if (static_cast<int>(done.size()) != m)
    throw Error(ErrorKind::FamilyNotMaximal, "descent produced the wrong number of pieces", atom,
                static_cast<double>(done.size()));
  return done;
}

std::vector<IdempotentField> extract_minimal_family(const std::vector<IdempotentField>& family,
                                                    int m, const Tolerances& tol) {
  if (family.empty()) throw Error(ErrorKind::InvalidInput, "family is empty");
  const MatrixField& base = family.front().base;
  for (const IdempotentField& q : family) {
    if (q.m != m || !q.base.space()->same_as(*base.space()) ||
        q.base.max_abs_difference(base) != 0.0)
      throw Error(ErrorKind::DifferentBaseOperator, "family members live over different operators");
  }
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b)
      for (std::size_t i : base.finite_atoms()) {
        const Matrix& p = family[a].field.block(i);
        const Matrix& q = family[b].field.block(i);
        const double c = (p * q - q * p).norm();
        if (c > tol.commute * (1.0 + linalg::frobenius(p) * linalg::frobenius(q)))
          throw Error(ErrorKind::NotAbelian, "family members do not commute", label_of(base, i), c);
      }

  const auto algebras = commutant_algebras(base, tol);
  std::vector<std::vector<std::optional<Series>>> coeffs;
  for (const IdempotentField& q : family) coeffs.push_back(decompose_field(q.field, m, algebras, tol));

  std::vector<std::vector<std::optional<Matrix>>> blocks(m, std::vector<std::optional<Matrix>>(base.size()));
  for (std::size_t i : base.finite_atoms()) {
    std::vector<Series> gens;
    for (const auto& c : coeffs) gens.push_back(*c[i]);
    const std::vector<Series> pieces = minimal_pieces(*algebras[i], gens, m, tol, label_of(base, i));
    for (int a = 0; a < m; ++a) blocks[a][i] = algebras[i]->expand(pieces[a]);
  }
  std::vector<IdempotentField> out;
  SpacePtr space = amplified_space(base, m);
  for (int a = 0; a < m; ++a) {
    MatrixField f(space, std::move(blocks[a]));
    double bound = 0.0;
    for (std::size_t i : f.finite_atoms()) bound = std::max(bound, spectral_norm(f.block(i)));
    out.push_back(IdempotentField{std::move(f), base, m, bound});
  }
  return out;
}

SeriesAlignment align_series(const CommutantAlgebra& algebra, const std::vector<Series>& minimal,
                             const Tolerances& tol) {
  const int m = static_cast<int>(minimal.size());
  SeriesAlignment out{algebra.identity(m), algebra.identity(m), {}};
  for (int i = 0; i < m; ++i) {
    // Earlier positions are already standard, and orthogonality confines the
    // next idempotent to the trailing corner.
    const Series q = algebra.conjugate(out.x, minimal[i], out.x_inv);
    SeriesReduction step = canonicalize_series(algebra, corner(q, i, m - i), tol);
    const Series xi = embed_corner(step.x, i, m);
    const Series xi_inv = embed_corner(step.x_inv, i, m);
    out.x = algebra.multiply(xi, out.x);
    out.x_inv = algebra.multiply(out.x_inv, xi_inv);
    out.steps.push_back(std::move(step));
  }
  return out;
}

Alignment align_family(const std::vector<IdempotentField>& family, const Tolerances& tol) {
  if (family.empty()) throw Error(ErrorKind::InvalidInput, "family is empty");
  const int m = family.front().m;
  const MatrixField& base = family.front().base;
  std::vector<IdempotentField> minimal = extract_minimal_family(family, m, tol);
  const auto algebras = commutant_algebras(base, tol);

  std::vector<std::vector<std::optional<Series>>> min_coeffs;
  for (const IdempotentField& q : minimal) min_coeffs.push_back(decompose_field(q.field, m, algebras, tol));

  std::vector<std::optional<Series>> xs(base.size()), xis(base.size());
  std::vector<std::optional<SeriesAlignment>> per_atom(base.size());
  for (std::size_t i : base.finite_atoms()) {
    std::vector<Series> pieces;
    for (const auto& c : min_coeffs) pieces.push_back(*c[i]);
    per_atom[i] = align_series(*algebras[i], pieces, tol);
    xs[i] = per_atom[i]->x;
    xis[i] = per_atom[i]->x_inv;
  }

  std::vector<LogEntry> log;
  for (int a = 0; a < m; ++a) {
    log.push_back({"X_" + std::to_string(a + 1),
                   "moves minimal idempotent " + std::to_string(a + 1) + " to its standard position",
                   factor_field(base, m, algebras, [&](std::size_t i, const CommutantAlgebra& alg) {
                     return alg.expand(embed_corner(per_atom[i]->steps[a].x, a, m));
                   })});
  }
  SimilarityCertificate cert = make_certificate(base, m, algebras, xs, xis, std::move(log), tol);

  double residual = 0.0;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    for (std::size_t i : base.finite_atoms()) {
      const Matrix c = cert.x.block(i) * family[idx].field.block(i) * cert.x_inv.block(i);
      const Series s = algebras[i]->decompose(c, m);
      const Series target = algebras[i]->constant(nearest_diagonal_projection(s.front()));
      residual = std::max(residual, series_distance(s, target));
    }
  }
  for (int a = 0; a < m; ++a) {
    for (std::size_t i : base.finite_atoms()) {
      const Matrix c = cert.x.block(i) * minimal[a].field.block(i) * cert.x_inv.block(i);
      Matrix e = Matrix::Zero(m, m);
      e(a, a) = 1.0;
      residual = std::max(residual, (c - algebras[i]->expand(algebras[i]->constant(e))).cwiseAbs().maxCoeff());
    }
  }
  return Alignment{std::move(cert), std::move(minimal), residual};
}

FamilyMap map_family_onto(const std::vector<IdempotentField>& from,
                          const std::vector<IdempotentField>& onto, const Tolerances& tol) {
  if (from.empty() || onto.empty()) throw Error(ErrorKind::InvalidInput, "family is empty");
  const MatrixField& base = from.front().base;
  if (!onto.front().base.space()->same_as(*base.space()) ||
      onto.front().base.max_abs_difference(base) != 0.0 || onto.front().m != from.front().m)
    throw Error(ErrorKind::DifferentBaseOperator, "families live over different operators");
  const Alignment a = align_family(from, tol);
  const Alignment b = align_family(onto, tol);
  SimilarityCertificate cert = b.certificate.inverse().compose_after(a.certificate);
  for (std::size_t i : base.finite_atoms())
    if (!(cert.condition[i] <= tol.kappa_max))
      throw Error(ErrorKind::SingularCertificate, "composed certificate exceeds the conditioning cap",
                  label_of(base, i), cert.condition[i]);

  // Minimal pieces map onto each other, so every lattice element does too.
  double residual = std::max(a.residual, b.residual);
  for (std::size_t k = 0; k < a.minimal.size(); ++k) {
    const MatrixField c = field_mul(field_mul(cert.x, a.minimal[k].field), cert.x_inv);
    residual = std::max(residual, c.max_abs_difference(b.minimal[k].field));
  }
  return FamilyMap{std::move(cert), residual};
}

}  // namespace sid
