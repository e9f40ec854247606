#include "sid/measure_field.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sid/error.hpp"

namespace sid {

int Atom::dim() const {
  if (!fiber_dim)
    throw Error(ErrorKind::SymbolicFiber, "atom has an infinite fiber", label);
  return *fiber_dim;
}

SpacePtr AtomicSpace::build(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(ErrorKind::EmptySpace, "a space needs at least one atom");
  std::set<std::string> seen;
  for (const Atom& a : atoms) {
    if (!seen.insert(a.label).second)
      throw Error(ErrorKind::DuplicateLabel, "duplicate atom label '" + a.label + "'", a.label);
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw Error(ErrorKind::NonpositiveWeight, "atom weight must be positive and finite",
                  a.label, a.weight);
    if (a.fiber_dim && *a.fiber_dim < 1)
      throw Error(ErrorKind::InvalidInput, "fiber dimension must be positive", a.label);
    if (a.fiber_dim && (a.infinite_class || a.spectral_value))
      throw Error(ErrorKind::InvalidInput,
                  "only infinite atoms may declare a class or spectral value", a.label);
    if (a.infinite_class && *a.infinite_class < 1)
      throw Error(ErrorKind::InvalidInput, "declared class must be positive", a.label);
  }
  std::shared_ptr<AtomicSpace> space(new AtomicSpace());
  space->atoms_ = std::move(atoms);
  space->compute_classes();
  return space;
}

void AtomicSpace::compute_classes() {
  classes_.clear();
  std::set<int> dims;
  bool any_inf = false;
  for (const Atom& a : atoms_) {
    if (a.fiber_dim) dims.insert(*a.fiber_dim);
    else any_inf = true;
  }
  for (int d : dims) {
    DimensionClass c{d, {}};
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i].fiber_dim == d) c.atoms.push_back(i);
    classes_.push_back(std::move(c));
  }
  if (any_inf) {
    DimensionClass c{std::nullopt, {}};
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i].is_infinite()) c.atoms.push_back(i);
    classes_.push_back(std::move(c));
  }
}

std::optional<std::size_t> AtomicSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].label == label) return i;
  return std::nullopt;
}

SpacePtr AtomicSpace::amplified(int m) const {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "amplification must be at least 1");
  if (m == 1) {
    return std::shared_ptr<AtomicSpace>(new AtomicSpace(*this));
  }
  std::shared_ptr<AtomicSpace> out(new AtomicSpace(*this));
  for (Atom& a : out->atoms_)
    if (a.fiber_dim) a.fiber_dim = *a.fiber_dim * m;
  out->amplification_ = amplification_ * m;
  out->compute_classes();
  return out;
}

bool AtomicSpace::same_base(const AtomicSpace& other) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    const Atom& b = other.atoms_[i];
    if (a.label != b.label || a.weight != b.weight || a.is_infinite() != b.is_infinite())
      return false;
    if (!a.is_infinite() && base_dim(i) != other.base_dim(i)) return false;
  }
  return true;
}

bool AtomicSpace::same_as(const AtomicSpace& other) const {
  return this == &other ||
         (amplification_ == other.amplification_ && same_base(other));
}

double AtomicSpace::total_weight() const {
  double w = 0.0;
  for (const Atom& a : atoms_) w += a.weight;
  return w;
}

bool AtomicSpace::has_infinite() const {
  return std::any_of(atoms_.begin(), atoms_.end(),
                     [](const Atom& a) { return a.is_infinite(); });
}

SpacePtr build_space(const std::vector<AtomDescription>& descriptions) {
  std::vector<Atom> atoms;
  atoms.reserve(descriptions.size());
  for (const auto& d : descriptions) {
    Atom a;
    a.label = d.label;
    a.weight = d.weight;
    if (d.fiber_dim > 0) a.fiber_dim = d.fiber_dim;
    else if (d.fiber_dim < 0)
      throw Error(ErrorKind::InvalidInput, "fiber dimension must be positive", d.label);
    atoms.push_back(std::move(a));
  }
  return AtomicSpace::build(std::move(atoms));
}

// ---------------------------------------------------------------------------

MatrixField::MatrixField(SpacePtr space, std::vector<std::optional<Matrix>> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  if (!space_) throw Error(ErrorKind::InvalidInput, "field without a space");
  if (blocks_.size() != space_->size())
    throw Error(ErrorKind::DimensionMismatch, "one block slot per atom required");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Atom& a = space_->atom(i);
    if (a.is_infinite()) {
      if (blocks_[i])
        throw Error(ErrorKind::SymbolicFiber, "infinite atoms carry no matrix data", a.label);
      continue;
    }
    if (!blocks_[i])
      throw Error(ErrorKind::InvalidInput, "field undefined on a finite atom", a.label);
    const Matrix& b = *blocks_[i];
    if (b.rows() != *a.fiber_dim || b.cols() != *a.fiber_dim)
      throw Error(ErrorKind::DimensionMismatch,
                  "block is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                      ", fiber dimension is " + std::to_string(*a.fiber_dim),
                  a.label);
    if (!b.allFinite())
      throw Error(ErrorKind::InvalidInput, "non-finite matrix entry", a.label);
  }
}

MatrixField MatrixField::identity(SpacePtr space) {
  return from_blocks(space, [&](std::size_t i) {
    const int n = space->atom(i).dim();
    return Matrix::Identity(n, n);
  });
}

MatrixField MatrixField::zero(SpacePtr space) {
  return from_blocks(space, [&](std::size_t i) {
    const int n = space->atom(i).dim();
    return Matrix::Zero(n, n);
  });
}

MatrixField MatrixField::from_blocks(SpacePtr space,
                                     const std::function<Matrix(std::size_t)>& make) {
  std::vector<std::optional<Matrix>> blocks(space->size());
  for (std::size_t i = 0; i < space->size(); ++i)
    if (!space->atom(i).is_infinite()) blocks[i] = make(i);
  return MatrixField(std::move(space), std::move(blocks));
}

const Matrix& MatrixField::block(std::size_t i) const {
  const auto& b = blocks_.at(i);
  if (!b)
    throw Error(ErrorKind::SymbolicFiber, "no numeric data on an infinite atom",
                space_->atom(i).label);
  return *b;
}

const Matrix& MatrixField::block(std::string_view label) const {
  const auto idx = space_->index_of(label);
  if (!idx) throw Error(ErrorKind::InvalidInput, "unknown atom '" + std::string(label) + "'");
  return block(*idx);
}

std::vector<std::size_t> MatrixField::finite_atoms() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i]) out.push_back(i);
  return out;
}

double MatrixField::max_abs_difference(const MatrixField& other) const {
  if (!space_->same_as(*other.space_))
    throw Error(ErrorKind::SpaceMismatch, "fields live on different spaces");
  double d = 0.0;
  for (std::size_t i : finite_atoms())
    d = std::max(d, (block(i) - other.block(i)).cwiseAbs().maxCoeff());
  return d;
}

// ---------------------------------------------------------------------------

Complex SITriangularForm::phi(std::size_t i) const {
  const auto& d = diagonal.at(i);
  if (!d)
    throw Error(ErrorKind::SymbolicFiber, "no spectral value on an infinite atom",
                base.space()->atom(i).label);
  return *d;
}

const Matrix& SITriangularForm::nilpotent(std::size_t i) const {
  const auto& s = strict_upper.at(i);
  if (!s)
    throw Error(ErrorKind::SymbolicFiber, "no numeric data on an infinite atom",
                base.space()->atom(i).label);
  return *s;
}

MatrixField SITriangularForm::reconstruct() const {
  return MatrixField::from_blocks(base.space(), [&](std::size_t i) {
    const Matrix& s = nilpotent(i);
    return Matrix(phi(i) * Matrix::Identity(s.rows(), s.cols()) + s);
  });
}

SITriangularForm validate_si_form(const MatrixField& field, const Tolerances& tol) {
  const auto& space = field.space();
  SITriangularForm form{field, std::vector<std::optional<Complex>>(space->size()),
                        std::vector<std::optional<Matrix>>(space->size())};
  for (std::size_t i : field.finite_atoms()) {
    const Matrix& b = field.block(i);
    const std::string& label = space->atom(i).label;
    const double scale = std::max(1.0, b.norm());
    const double threshold = tol.diag * scale;
    if (!linalg::is_upper_triangular(b, threshold))
      throw Error(ErrorKind::NotUpperTriangular, "block has nonzero entries below the diagonal",
                  label);
    const Complex phi = b.diagonal().mean();
    const double deviation = (b.diagonal().array() - phi).abs().maxCoeff();
    if (deviation > threshold)
      throw Error(ErrorKind::DiagonalNotConstant,
                  "diagonal entries differ by up to " + std::to_string(deviation), label,
                  deviation);
    Matrix strict = b.triangularView<Eigen::StrictlyUpper>();
    form.diagonal[i] = phi;
    form.strict_upper[i] = std::move(strict);
  }
  return form;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_space(const MatrixField& a, const MatrixField& b) {
  if (!a.space()->same_as(*b.space()))
    throw Error(ErrorKind::SpaceMismatch, "fields live on different spaces");
}

}  // namespace

MatrixField field_mul(const MatrixField& a, const MatrixField& b) {
  require_same_space(a, b);
  return MatrixField::from_blocks(a.space(),
                                  [&](std::size_t i) { return Matrix(a.block(i) * b.block(i)); });
}

MatrixField field_add(const MatrixField& a, const MatrixField& b) {
  require_same_space(a, b);
  return MatrixField::from_blocks(a.space(),
                                  [&](std::size_t i) { return Matrix(a.block(i) + b.block(i)); });
}

MatrixField field_sub(const MatrixField& a, const MatrixField& b) {
  require_same_space(a, b);
  return MatrixField::from_blocks(a.space(),
                                  [&](std::size_t i) { return Matrix(a.block(i) - b.block(i)); });
}

MatrixField field_scale(const MatrixField& a, Complex s) {
  return MatrixField::from_blocks(a.space(), [&](std::size_t i) { return Matrix(s * a.block(i)); });
}

MatrixField field_adjoint(const MatrixField& a) {
  return MatrixField::from_blocks(a.space(),
                                  [&](std::size_t i) { return Matrix(a.block(i).adjoint()); });
}

MatrixField field_inverse(const MatrixField& x, const Tolerances& tol) {
  std::vector<double> cond(x.size(), 0.0);
  MatrixField out = MatrixField::from_blocks(x.space(), [&](std::size_t i) {
    const Matrix& b = x.block(i);
    const double kappa = linalg::condition_number(b);
    if (!(1.0 / kappa > tol.sing))
      throw Error(ErrorKind::SingularBlock,
                  "block is singular (condition estimate " + std::to_string(kappa) + ")",
                  x.space()->atom(i).label, kappa);
    cond[i] = kappa;
    return Matrix(b.fullPivLu().inverse());
  });
  out.set_condition_numbers(std::move(cond));
  return out;
}

MatrixField amplify(const MatrixField& t, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "amplification must be at least 1");
  if (m == 1) return t;
  SpacePtr space = t.space()->amplified(m);
  return MatrixField::from_blocks(space, [&](std::size_t i) {
    return linalg::kron(Matrix::Identity(m, m), t.block(i));
  });
}

}  // namespace sid
