#include "sid/sid_engine.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sid/commutant.hpp"
#include "sid/error.hpp"
#include "sid/jordan_si.hpp"

namespace sid {

namespace {

// Dimension class of an atom: its base fiber dimension, the class an
// infinite atom declares, or empty for Λ_∞.
std::optional<int> class_of(const MatrixField& t, std::size_t i) {
  const Atom& a = t.space()->atom(i);
  if (!a.is_infinite()) return t.space()->base_dim(i);
  return a.infinite_class;
}

// Finite classes ascending, Λ_∞ last.
bool class_less(const std::optional<int>& a, const std::optional<int>& b) {
  if (a && b) return *a < *b;
  return a.has_value() && !b.has_value();
}

struct PointAssignment {
  std::vector<std::optional<Complex>> phi;   // per atom
  std::vector<std::optional<int>> cluster;   // per atom
};

PointAssignment assign_points(const MatrixField& t, const Tolerances& tol) {
  const SITriangularForm form = validate_si_form(t, tol);
  PointAssignment out;
  out.phi.assign(t.size(), std::nullopt);
  out.cluster.assign(t.size(), std::nullopt);
  std::vector<Complex> values;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Atom& a = t.space()->atom(i);
    if (!a.is_infinite()) out.phi[i] = form.phi(i);
    else out.phi[i] = a.spectral_value;
    if (out.phi[i]) {
      values.push_back(*out.phi[i]);
      owners.push_back(i);
    }
  }
  const std::vector<int> ids = cluster_spectral_values(values, tol);
  for (std::size_t k = 0; k < owners.size(); ++k) out.cluster[owners[k]] = ids[k];
  return out;
}

std::string format_phi(const std::optional<Complex>& phi) {
  if (!phi) return "unspecified";
  std::ostringstream os;
  os << phi->real();
  if (phi->imag() != 0.0) os << (phi->imag() < 0 ? "-" : "+") << std::abs(phi->imag()) << "i";
  return os.str();
}

std::string class_name(const std::optional<int>& dim) {
  return dim ? "n=" + std::to_string(*dim) : "Λ_∞";
}

MatrixField restrict_to(const MatrixField& t, const std::vector<std::size_t>& atoms) {
  std::vector<Atom> sub;
  std::vector<std::optional<Matrix>> blocks;
  for (std::size_t i : atoms) {
    sub.push_back(t.space()->atom(i));
    blocks.push_back(t.has_block(i) ? std::optional<Matrix>(t.block(i)) : std::nullopt);
  }
  return MatrixField(AtomicSpace::build(std::move(sub)), std::move(blocks));
}

}  // namespace

MultiplicityProfile multiplicity_profile(const MatrixField& t, const Tolerances& tol) {
  const PointAssignment pts = assign_points(t, tol);
  std::vector<std::optional<int>> classes;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto c = class_of(t, i);
    if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
  }
  std::sort(classes.begin(), classes.end(), class_less);

  MultiplicityProfile out;
  for (const auto& c : classes) {
    ClassProfile cp;
    cp.dim = c;
    // Points keyed by cluster id; -1 collects infinite atoms without a value.
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (class_of(t, i) != c) continue;
      const int key = pts.cluster[i] ? *pts.cluster[i] : -1;
      auto it = slot.find(key);
      if (it == slot.end()) {
        it = slot.emplace(key, cp.points.size()).first;
        cp.points.push_back({pts.phi[i], 0, {}});
      }
      PointMultiplicity& pm = cp.points[it->second];
      pm.atoms.push_back(i);
      if (t.space()->atom(i).is_infinite()) {
        pm.multiplicity.reset();
      } else {
        ++cp.finite_atoms;
        if (pm.multiplicity) ++*pm.multiplicity;
      }
    }
    for (const PointMultiplicity& pm : cp.points)
      if (!pm.multiplicity) cp.is_simple = false;
    if (!c) cp.is_simple = false;
    out.is_simple = out.is_simple && cp.is_simple;
    out.per_class.push_back(std::move(cp));
  }
  return out;
}

bool check_mutual_singularity(const MatrixField& t, const Tolerances& tol) {
  const PointAssignment pts = assign_points(t, tol);
  std::map<int, std::optional<int>> owner;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!pts.cluster[i]) continue;
    const auto c = class_of(t, i);
    auto [it, inserted] = owner.emplace(*pts.cluster[i], c);
    if (!inserted && it->second != c) return false;
  }
  return true;
}

UniquenessVerdict decide_uniqueness(const MatrixField& t, const Tolerances& tol) {
  SITriangularForm form = [&] {
    try {
      return validate_si_form(t, tol);
    } catch (const Error& e) {
      throw Error(ErrorKind::NotSIForm, e.what(), e.atom(), e.value());
    }
  }();
  const SIVerdict si = si_test_superdiagonal(form, tol);
  if (!si.overall) {
    for (std::size_t i = 0; i < si.per_atom.size(); ++i)
      if (si.per_atom[i] && !*si.per_atom[i])
        throw Error(ErrorKind::NotSIForm, "fiber is not strongly irreducible",
                    t.space()->atom(i).label);
  }
  if (!check_mutual_singularity(t, tol))
    throw Error(ErrorKind::HypothesisUnsupported,
                "dimension classes share spectrum points; the multiplicity criterion needs them disjoint");

  UniquenessVerdict v;
  v.profile = multiplicity_profile(t, tol);
  v.k0 = k0_descriptor(t, tol);
  for (const ClassProfile& cp : v.profile.per_class) {
    ClassReason r{cp.dim, cp.is_simple, {}};
    if (!cp.dim) {
      r.reason = "Λ_∞ is nonempty: fibers of infinite dimension class";
    } else if (!cp.is_simple) {
      for (const PointMultiplicity& pm : cp.points)
        if (!pm.multiplicity) {
          r.reason = "infinite multiplicity at phi=" + format_phi(pm.phi);
          break;
        }
    } else {
      int top = 0;
      for (const PointMultiplicity& pm : cp.points) top = std::max(top, *pm.multiplicity);
      r.reason = "simple multiplicity (max " + std::to_string(top) + ") in class " + class_name(cp.dim);
    }
    v.reasons.push_back(std::move(r));
  }
  v.unique = v.profile.is_simple && !t.space()->has_infinite();
  v.k0_consistent = v.unique == v.k0.zero_contributions.empty();
  return v;
}

std::vector<ClassSubproblem> split_commutant_by_class(const MatrixField& t, const Tolerances& tol) {
  if (!check_mutual_singularity(t, tol))
    throw Error(ErrorKind::HypothesisUnsupported, "dimension classes are not mutually singular");
  std::vector<std::optional<int>> classes;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto c = class_of(t, i);
    if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
  }
  std::sort(classes.begin(), classes.end(), class_less);
  std::vector<ClassSubproblem> out;
  for (const auto& c : classes) {
    std::vector<std::size_t> atoms;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (class_of(t, i) == c) atoms.push_back(i);
    out.push_back({c, atoms, restrict_to(t, atoms)});
  }
  return out;
}

std::vector<MultiplicitySubproblem> multiplicity_subproblems(const MatrixField& t,
                                                             const Tolerances& tol) {
  const PointAssignment pts = assign_points(t, tol);
  std::map<int, std::size_t> slot;
  std::vector<MultiplicitySubproblem> out;
  for (std::size_t i : t.finite_atoms()) {
    const int key = *pts.cluster[i];
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.size()).first;
      out.push_back({*pts.phi[i], 0, {}, true, restrict_to(t, {i})});
    }
    MultiplicitySubproblem& sp = out[it->second];
    const Matrix& first = t.block(sp.atoms.empty() ? i : sp.atoms.front());
    const Matrix& b = t.block(i);
    if (b.rows() != first.rows() ||
        (b - first).cwiseAbs().maxCoeff() > tol.diag * std::max(1.0, first.norm()))
      sp.identical_blocks = false;
    sp.atoms.push_back(i);
    ++sp.multiplicity;
  }
  return out;
}

}  // namespace sid
