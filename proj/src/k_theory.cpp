#include "sid/k_theory.hpp"

#include <cmath>

#include "sid/commutant.hpp"
#include "sid/error.hpp"

namespace sid {

std::string K0Descriptor::shape() const {
  if (spectrum_support.empty()) return "0";
  return spectrum_support.size() == 1 ? "Z" : "Z^" + std::to_string(spectrum_support.size());
}

SpectrumPoints spectrum_points(const MatrixField& t, const Tolerances& tol) {
  const SITriangularForm form = validate_si_form(t, tol);
  const std::vector<std::size_t> finite = t.finite_atoms();
  std::vector<Complex> phis;
  for (std::size_t i : finite) phis.push_back(form.phi(i));
  const std::vector<int> ids = cluster_spectral_values(phis, tol);

  SpectrumPoints out;
  out.atom_point.assign(t.size(), std::nullopt);
  for (std::size_t k = 0; k < finite.size(); ++k) {
    if (ids[k] == static_cast<int>(out.points.size())) out.points.push_back(phis[k]);
    out.atom_point[finite[k]] = ids[k];
  }
  return out;
}

K0Class trace_class(const IdempotentField& p, const Tolerances& tol) {
  const SpectrumPoints sp = spectrum_points(p.base, tol);
  std::vector<double> raw(sp.points.size(), 0.0);
  for (std::size_t i : p.field.finite_atoms()) {
    const Matrix& b = p.field.block(i);
    const Complex tr = b.trace();
    const int rank = linalg::numerical_rank(b, tol.rank);
    const std::string& label = p.field.space()->atom(i).label;
    if (std::abs(tr - Complex(rank, 0.0)) > tol.integer_gate * std::max(1.0, double(b.rows())))
      throw Error(ErrorKind::InconsistentTrace, "trace of the idempotent differs from its rank", label,
                  std::abs(tr - Complex(rank, 0.0)));
    raw[*sp.atom_point[i]] += tr.real() / p.field.space()->base_dim(i);
  }
  K0Class out{sp.points, {}, 0.0};
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double r = std::round(raw[k]);
    const double d = std::abs(raw[k] - r);
    if (d > tol.integer_gate)
      throw Error(ErrorKind::NonIntegerClass, "normalized trace is not an integer", {}, raw[k]);
    out.max_rounding = std::max(out.max_rounding, d);
    out.values.push_back(static_cast<long long>(r));
  }
  return out;
}

K0Descriptor k0_descriptor(const MatrixField& t, const Tolerances& tol) {
  const SpectrumPoints sp = spectrum_points(t, tol);
  K0Descriptor out;
  out.spectrum_support = sp.points;
  out.point_dimensions.assign(sp.points.size(), 0);
  for (std::size_t i : t.finite_atoms()) out.point_dimensions[*sp.atom_point[i]] = t.block(i).rows();
  for (std::size_t k = 0; k < sp.points.size(); ++k) {
    K0Class g{sp.points, std::vector<long long>(sp.points.size(), 0), 0.0};
    g.values[k] = 1;
    out.generators.push_back(std::move(g));
  }
  for (const Atom& a : t.space()->atoms())
    if (a.is_infinite()) out.zero_contributions.push_back({a.label, a.infinite_class, a.spectral_value});
  return out;
}

bool k0_equal(const IdempotentField& p, const IdempotentField& q, const Tolerances& tol) {
  if (!p.base.space()->same_as(*q.base.space()) || p.base.max_abs_difference(q.base) != 0.0)
    throw Error(ErrorKind::DifferentBaseOperator, "idempotents live over different operators");
  return trace_class(p, tol) == trace_class(q, tol);
}

}  // namespace sid
