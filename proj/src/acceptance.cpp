#include "sid/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "sid/cli.hpp"
#include "sid/commutant.hpp"
#include "sid/error.hpp"
#include "sid/generator.hpp"
#include "sid/jordan_si.hpp"
#include "sid/sid_engine.hpp"

namespace sid {

namespace {

// Pinned acceptance thresholds.
constexpr double kSylvesterResidual = 1e-9;
constexpr double kReductionResidual = 1e-9;
constexpr double kCommutationResidual = 1e-8;
constexpr double kFamilyMapResidual = 1e-6;
constexpr double kSIRuntimeBudget = 10.0;
constexpr int kSearchAttempts = 1000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MatrixField single_atom(const Matrix& block) {
  return MatrixField(build_space({{"a", 1.0, static_cast<int>(block.rows())}}), {block});
}

Matrix unit(int m, int a) {
  Matrix e = Matrix::Zero(m, m);
  e(a, a) = 1.0;
  return e;
}

double series_distance(const Series& a, const Series& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return d;
}

Matrix rounded_diagonal(const Matrix& c) {
  Matrix d = Matrix::Zero(c.rows(), c.cols());
  for (Eigen::Index a = 0; a < c.rows(); ++a) d(a, a) = std::abs(c(a, a)) > 0.5 ? 1.0 : 0.0;
  return d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

// Field over T^(m) from one series per finite atom.
MatrixField field_from_series(const MatrixField& t, int m,
                              const std::vector<std::optional<CommutantAlgebra>>& alg,
                              const std::vector<std::optional<Series>>& s) {
  return MatrixField::from_blocks(t.space()->amplified(m),
                                  [&](std::size_t i) { return alg[i]->expand(*s[i]); });
}

bool is_nested_diagonal_projection(const IdempotentField& p) {
  for (std::size_t i : p.field.finite_atoms()) {
    const Matrix& b = p.field.block(i);
    const Eigen::Index n = b.rows() / p.m;
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const Complex v = b(r, c);
        if (r != c && v != Complex(0.0)) return false;
        if (r == c && v != Complex(0.0) && v != Complex(1.0)) return false;
      }
    for (Eigen::Index a = 0; a + 1 < p.m; ++a)
      if (b((a + 1) * n, (a + 1) * n) == Complex(1.0) && b(a * n, a * n) == Complex(0.0)) return false;
  }
  return true;
}

CriterionResult named(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  return r;
}

CriterionResult finish(CriterionResult r, Clock::time_point t0) {
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace

CriterionResult check_si_equivalence(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(1, "superdiagonal-criterion-equivalence");
  Rng rng(seed);
  int disagreements = 0, si_count = 0, errors = 0;
  const int trials = 500;
  for (int k = 0; k < trials; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    Matrix b = random_si_block(rng, n, uniform_complex(rng));
    for (int i = 0; i + 1 < n; ++i)
      if (uniform(rng, 0.0, 1.0) < 0.3) b(i, i + 1) = 0.0;
    try {
      const SIVerdict v = si_test_superdiagonal(validate_si_form(single_atom(b), tol), tol);
      const bool fast = *v.per_atom[0];
      const bool oracle = si_test_general(b, tol);
      si_count += fast;
      if (fast != oracle) ++disagreements;
    } catch (const Error&) {
      ++errors;
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = disagreements == 0 && errors == 0 && r.seconds < kSIRuntimeBudget;
  r.detail = std::to_string(trials) + " blocks, " + std::to_string(si_count) + " SI, " +
             std::to_string(disagreements) + " disagreements, " + std::to_string(errors) +
             " errors, budget " + fmt(kSIRuntimeBudget) + " s";
  r.metrics = {{"trials", trials}, {"si", si_count}, {"disagreements", disagreements}, {"errors", errors}};
  return r;
}

CriterionResult check_commutant_dimensions(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(2, "fiber-commutant-dimensions");
  Rng rng(seed);
  int wrong = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const CommutantBasis c = fiber_commutant(random_si_block(rng, n, uniform_complex(rng)), tol);
    if (c.dimension() != n) ++wrong;
    worst = std::max(worst, c.max_residual);
  }
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Complex alpha = uniform_complex(rng);
      const CommutantBasis c = fiber_commutant(alpha * Matrix::Identity(n, n), tol);
      if (c.dimension() != n * n) ++wrong;
      worst = std::max(worst, c.max_residual);
    }
  }
  r.passed = wrong == 0 && worst <= kSylvesterResidual;
  r.detail = "200 SI blocks + 25 scalar blocks, " + std::to_string(wrong) +
             " wrong dimensions, max Sylvester residual " + fmt(worst);
  r.metrics = {{"wrong_dimensions", wrong}, {"max_residual", worst}};
  return finish(r, t0);
}

CriterionResult check_pointwise_reduction(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(3, "pointwise-idempotent-reduction");
  Rng rng(seed);
  int wrong_rank = 0, bound_violations = 0, errors = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int rank = static_cast<int>(rng() % (n + 1));
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::pow(10.0, uniform(rng, 0.0, 2.0));
    const Matrix v = random_unitary(rng, n) * s.asDiagonal() * random_unitary(rng, n);
    Matrix d = Matrix::Zero(n, n);
    d.topLeftCorner(rank, rank).setIdentity();
    const Matrix p = v * d * v.inverse();
    try {
      const PointwiseReduction red = reduce_pointwise(p, tol);
      if (red.rank != rank) ++wrong_rank;
      worst = std::max(worst, (red.y * p * red.y_inv - red.projection).cwiseAbs().maxCoeff());
      if (linalg::singular_values(red.y)(0) > red.norm_bound * (1.0 + 1e-9)) ++bound_violations;
    } catch (const Error&) {
      ++errors;
    }
  }
  r.passed = wrong_rank == 0 && errors == 0 && bound_violations == 0 && worst <= kReductionResidual;
  r.detail = "200 idempotents, " + std::to_string(wrong_rank) + " rank mismatches, " +
             std::to_string(bound_violations) + " norm-bound violations, max residual " + fmt(worst);
  r.metrics = {{"wrong_rank", wrong_rank}, {"bound_violations", bound_violations},
               {"errors", errors}, {"max_residual", worst}};
  return finish(r, t0);
}

CriterionResult check_canonical_forms(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(4, "canonical-forms-and-family-alignment");
  Rng rng(seed);
  int failures = 0, profile_mismatches = 0, shape_failures = 0, pair_failures = 0;
  double worst_comm = 0.0, worst_conj = 0.0, worst_map = 0.0;
  std::string first_error;
  auto note = [&](const std::string& what) {
    if (first_error.empty()) first_error = what;
  };

  for (int k = 0; k < 100; ++k) {
    GeneratorConfig g{rng(), 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3),
                      1 + static_cast<int>(rng() % 5), ""};
    try {
      const Document doc = parse_document(generate_instance(g, tol));
      const MatrixField& t = doc.field("T");
      const IdempotentField q = IdempotentField::make(doc.field("Q"), t, tol);
      const Canonicalization can = canonicalize_in_commutant(q, tol);
      if (!is_nested_diagonal_projection(can.projection)) ++shape_failures;
      worst_comm = std::max(worst_comm, can.certificate.commutation_residual);
      worst_conj = std::max(worst_conj, can.residual);
      const RankProfile seeded = rank_profile(q, tol);
      const RankProfile recovered = rank_profile(can.projection, tol);
      for (std::size_t i : t.finite_atoms()) {
        const int truth = doc.truth["rank_profile"][t.space()->atom(i).label].get<int>();
        if (*seeded.per_atom[i] != truth || *recovered.per_atom[i] != truth) ++profile_mismatches;
      }
    } catch (const Error& e) {
      ++failures;
      note(e.what());
    }
  }

  for (int k = 0; k < 50; ++k) {
    GeneratorConfig g{rng(), 1 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 2),
                      1 + static_cast<int>(rng() % 5), ""};
    try {
      const Document doc = parse_document(generate_instance(g, tol));
      const MatrixField& t = doc.field("T");
      std::vector<IdempotentField> f, h;
      for (const auto& name : doc.family("F")) f.push_back(IdempotentField::make(doc.field(name), t, tol));
      for (const auto& name : doc.family("G")) h.push_back(IdempotentField::make(doc.field(name), t, tol));
      const FamilyMap map = map_family_onto(f, h, tol);
      // Independent check of the composed map on the given generators.
      double res = map.residual;
      for (const IdempotentField& fi : f) {
        const MatrixField c = field_mul(field_mul(map.certificate.x, fi.field), map.certificate.x_inv);
        // Image must be idempotent and commute with every member of the target family.
        for (std::size_t i : t.finite_atoms()) {
          const Matrix& cb = c.block(i);
          res = std::max(res, (cb * cb - cb).cwiseAbs().maxCoeff());
          for (const IdempotentField& hj : h) {
            const Matrix& hb = hj.field.block(i);
            res = std::max(res, (cb * hb - hb * cb).cwiseAbs().maxCoeff());
          }
        }
      }
      worst_map = std::max(worst_map, res);
      worst_comm = std::max(worst_comm, map.certificate.commutation_residual);
      if (res > kFamilyMapResidual) ++pair_failures;
    } catch (const Error& e) {
      ++pair_failures;
      note(e.what());
    }
  }
  r.passed = failures == 0 && profile_mismatches == 0 && shape_failures == 0 && pair_failures == 0 &&
             worst_comm <= kCommutationResidual && worst_conj <= 1e-6;
  r.detail = "100 idempotents: " + std::to_string(failures) + " failures, " +
             std::to_string(shape_failures) + " non-diagonal, " + std::to_string(profile_mismatches) +
             " profile mismatches; 50 family pairs: " + std::to_string(pair_failures) +
             " failures, max map residual " + fmt(worst_map) + ", max commutation " + fmt(worst_comm);
  if (!first_error.empty()) r.detail += "; first error: " + first_error;
  r.metrics = {{"failures", failures},           {"shape_failures", shape_failures},
               {"profile_mismatches", profile_mismatches}, {"pair_failures", pair_failures},
               {"max_commutation", worst_comm},   {"max_conjugation", worst_conj},
               {"max_map_residual", worst_map}};
  return finish(r, t0);
}

CriterionResult check_k0_example(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(5, "k0-of-two-by-two-multiplication-operator");
  Rng rng(seed);
  int wrong_shape = 0, additivity = 0, invariance = 0, oracle = 0, unaligned = 0, errors = 0, equal_pairs = 0;
  double worst_map = 0.0;
  std::string first_error;

  for (int k : {2, 4, 8}) {
    std::vector<AtomDescription> desc;
    for (int j = 0; j < k; ++j) desc.push_back({"z" + std::to_string(j), 1.0 / k, 2});
    const SpacePtr space = build_space(desc);
    const MatrixField t = MatrixField::from_blocks(space, [&](std::size_t j) {
      const double z = (static_cast<double>(j) + 0.5) / k;
      Matrix b(2, 2);
      b << z, 1.0 + z, 0.0, z;
      return b;
    });
    if (k0_descriptor(t, tol).rank() != k) ++wrong_shape;
    const auto alg = commutant_algebras(t, tol);

    for (int trial = 0; trial < 100; ++trial) {
      try {
        const int m = 1 + static_cast<int>(rng() % 3);
        std::vector<std::optional<Series>> ps(k), qs(k), xps(k);
        std::vector<long long> expect_p(k), expect_q(k);
        for (int j = 0; j < k; ++j) {
          const CommutantAlgebra& a = *alg[j];
          const Series g = random_invertible_series(rng, a, m);
          const Series g_inv = a.inverse(g);
          Matrix dp = Matrix::Zero(m, m), dq = Matrix::Zero(m, m);
          for (int c = 0; c < m; ++c) {
            const auto pick = rng() % 3;
            if (pick == 0) dp(c, c) = 1.0, ++expect_p[j];
            if (pick == 1) dq(c, c) = 1.0, ++expect_q[j];
          }
          ps[j] = a.conjugate(g, a.constant(dp), g_inv);
          qs[j] = a.conjugate(g, a.constant(dq), g_inv);
          const Series x = random_invertible_series(rng, a, m);
          xps[j] = a.conjugate(x, *ps[j], a.inverse(x));
        }
        const IdempotentField p = IdempotentField::make(field_from_series(t, m, alg, ps), t, tol);
        const IdempotentField q = IdempotentField::make(field_from_series(t, m, alg, qs), t, tol);
        const IdempotentField pq = IdempotentField::make(field_add(p.field, q.field), t, tol);
        const IdempotentField xp = IdempotentField::make(field_from_series(t, m, alg, xps), t, tol);
        const K0Class cp = trace_class(p, tol), cq = trace_class(q, tol);
        const K0Class cpq = trace_class(pq, tol), cxp = trace_class(xp, tol);
        for (int j = 0; j < k; ++j) {
          if (cp.values[j] != expect_p[j] || cq.values[j] != expect_q[j]) ++oracle;
          if (cpq.values[j] != cp.values[j] + cq.values[j]) ++additivity;
        }
        if (!(cxp == cp)) ++invariance;
        if (k0_equal(p, xp, tol)) {
          // Equal classes: both canonicalize to the same projection, and the
          // composed certificate carries p onto its conjugate.
          ++equal_pairs;
          const Canonicalization a = canonicalize_in_commutant(p, tol);
          const Canonicalization b = canonicalize_in_commutant(xp, tol);
          const SimilarityCertificate c = b.certificate.inverse().compose_after(a.certificate);
          const MatrixField img = field_mul(field_mul(c.x, p.field), c.x_inv);
          const double res = std::max(a.projection.field.max_abs_difference(b.projection.field),
                                      img.max_abs_difference(xp.field));
          worst_map = std::max(worst_map, res);
          if (res > kFamilyMapResidual) ++unaligned;
        } else {
          ++unaligned;
        }
      } catch (const Error& e) {
        ++errors;
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  r.passed = wrong_shape == 0 && additivity == 0 && invariance == 0 && oracle == 0 && unaligned == 0 &&
             errors == 0;
  r.detail = "k in {2,4,8}: " + std::to_string(wrong_shape) + " wrong group shapes; 300 conjugations: " +
             std::to_string(additivity) + " additivity, " + std::to_string(invariance) +
             " invariance, " + std::to_string(oracle) + " trace-oracle failures; " +
             std::to_string(equal_pairs) + " equal-class pairs, " + std::to_string(unaligned) +
             " unaligned (max residual " + fmt(worst_map) + ")";
  if (!first_error.empty()) r.detail += "; first error: " + first_error;
  r.metrics = {{"wrong_shape", wrong_shape}, {"additivity", additivity}, {"invariance", invariance},
               {"oracle", oracle},           {"unaligned", unaligned},   {"errors", errors},
               {"max_map_residual", worst_map}};
  return finish(r, t0);
}

namespace {

std::string random_pattern(Rng& rng) {
  std::vector<int> dims{1, 2, 3};
  std::shuffle(dims.begin(), dims.end(), rng);
  const int classes = 1 + static_cast<int>(rng() % 3);
  std::string out;
  for (int c = 0; c < classes; ++c) {
    if (!out.empty()) out += ';';
    out += std::to_string(dims[c]) + ':';
    const int points = 1 + static_cast<int>(rng() % 3);
    const int inf_at = uniform(rng, 0.0, 1.0) < 0.2 ? static_cast<int>(rng() % points) : -1;
    for (int p = 0; p < points; ++p) {
      if (p) out += ',';
      out += p == inf_at ? std::string("inf") : std::to_string(1 + rng() % 3);
    }
  }
  if (uniform(rng, 0.0, 1.0) < 0.1) out += ";inf:1";
  return out;
}

// One randomized attempt at a pair of maximal abelian families in
// M_k({T_t}') that no certificate aligns. Returns the alignment residual.
double search_attempt(Rng& rng, const CommutantAlgebra& a, int k, const Tolerances& tol) {
  auto random_generators = [&](const Series& h, const Series& h_inv) {
    // Random subset indicators, completed so that every pair of copies is separated.
    std::vector<Matrix> diag;
    const int count = k + static_cast<int>(rng() % 2);
    for (int g = 0; g < count; ++g) {
      Matrix d = Matrix::Zero(k, k);
      for (int c = 0; c < k; ++c)
        if (rng() % 2) d(c, c) = 1.0;
      diag.push_back(d);
    }
    for (int c1 = 0; c1 < k; ++c1)
      for (int c2 = c1 + 1; c2 < k; ++c2) {
        bool separated = false;
        for (const Matrix& d : diag) separated = separated || d(c1, c1) != d(c2, c2);
        if (!separated) diag.push_back(unit(k, c1));
      }
    std::vector<Series> gens;
    for (const Matrix& d : diag) gens.push_back(a.conjugate(h, a.constant(d), h_inv));
    return gens;
  };
  const Series h1 = random_invertible_series(rng, a, k), h2 = random_invertible_series(rng, a, k);
  const auto gens1 = random_generators(h1, a.inverse(h1));
  const auto gens2 = random_generators(h2, a.inverse(h2));
  const SeriesAlignment al1 = align_series(a, minimal_pieces(a, gens1, k, tol, "search"), tol);
  const auto pieces2 = minimal_pieces(a, gens2, k, tol, "search");
  const SeriesAlignment al2 = align_series(a, pieces2, tol);
  const Series x = a.multiply(al2.x_inv, al1.x);
  const Series x_inv = a.multiply(al1.x_inv, al2.x);
  if (linalg::condition_number(a.expand(x)) > tol.kappa_max) return HUGE_VAL;
  double res = 0.0;
  for (const Series& g : gens1) {
    // X g X^-1 must be the lattice element of the second family with the
    // same pieces.
    const Series std_form = a.conjugate(al1.x, g, al1.x_inv);
    const Series target = a.conjugate(al2.x_inv, a.constant(rounded_diagonal(std_form.front())), al2.x);
    res = std::max(res, series_distance(a.conjugate(x, g, x_inv), target));
    res = std::max(res, series_distance(std_form, a.constant(rounded_diagonal(std_form.front()))));
  }
  return res;
}

}  // namespace

CriterionResult check_uniqueness_verdicts(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(6, "uniqueness-verdicts");
  Rng rng(seed);
  int mismatches = 0, k0_inconsistent = 0, split_mismatch = 0, errors = 0, unique_instances = 0;
  int attempts = 0, counterexamples = 0;
  double worst = 0.0;
  std::string first_error;
  for (int inst = 0; inst < 50; ++inst) {
    const std::string pattern = random_pattern(rng);
    try {
      const Document doc = parse_document(generate_instance({rng(), 2, 2, 3, pattern}, tol));
      const MatrixField& t = doc.field("T");
      const UniquenessVerdict v = decide_uniqueness(t, tol);
      if (v.unique != doc.truth["unique"].get<bool>()) ++mismatches;
      if (!v.k0_consistent || v.unique != v.k0.zero_contributions.empty()) ++k0_inconsistent;
      int class_atoms = 0, global_atoms = 0;
      for (const ClassSubproblem& sp : split_commutant_by_class(t, tol))
        for (const ClassProfile& cp : multiplicity_profile(sp.field, tol).per_class) class_atoms += cp.finite_atoms;
      for (const ClassProfile& cp : v.profile.per_class) global_atoms += cp.finite_atoms;
      if (class_atoms != global_atoms) ++split_mismatch;
      if (!v.unique) continue;

      ++unique_instances;
      const auto subs = multiplicity_subproblems(t, tol);
      for (int at = 0; at < kSearchAttempts; ++at) {
        const MultiplicitySubproblem& sp = subs[static_cast<std::size_t>(at) % subs.size()];
        if (!sp.identical_blocks) throw Error(ErrorKind::InvalidInput, "generated point with distinct blocks");
        const Matrix& b = sp.base.block(0);
        const CommutantAlgebra a(Matrix(b - sp.phi * Matrix::Identity(b.rows(), b.cols())));
        const int k = sp.multiplicity * (1 + at % 2);
        ++attempts;
        double res = HUGE_VAL;
        try {
          res = search_attempt(rng, a, k, tol);
        } catch (const Error&) {
        }
        worst = std::max(worst, res);
        if (!(res <= kFamilyMapResidual)) ++counterexamples;
      }
    } catch (const Error& e) {
      ++errors;
      if (first_error.empty()) first_error = pattern + ": " + e.what();
    }
  }
  r.passed = mismatches == 0 && k0_inconsistent == 0 && split_mismatch == 0 && errors == 0 &&
             counterexamples == 0;
  r.detail = "50 instances (" + std::to_string(unique_instances) + " unique): " +
             std::to_string(mismatches) + " verdict mismatches, " + std::to_string(k0_inconsistent) +
             " K0 inconsistencies; " + std::to_string(attempts) + " search attempts, " +
             std::to_string(counterexamples) + " non-alignable (max residual " + fmt(worst) + ")";
  if (!first_error.empty()) r.detail += "; first error: " + first_error;
  r.metrics = {{"mismatches", mismatches},   {"k0_inconsistent", k0_inconsistent},
               {"split_mismatch", split_mismatch}, {"errors", errors},
               {"unique_instances", unique_instances}, {"attempts", attempts},
               {"counterexamples", counterexamples},   {"max_residual", worst}};
  return finish(r, t0);
}

CriterionResult check_determinism(std::uint64_t seed, const Tolerances& tol) {
  const auto t0 = Clock::now();
  CriterionResult r = named(7, "determinism");
  int differences = 0, checks = 0;
  std::string failure;
  const std::vector<GeneratorConfig> configs = {
      {seed, 2, 2, 3, ""}, {seed + 1, 3, 3, 4, ""}, {seed + 2, 2, 2, 3, "1:1,2;2:1;3:inf"}};
  const auto dir = std::filesystem::temp_directory_path();
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const std::string a = generate_instance(configs[c], tol).dump();
    const std::string b = generate_instance(configs[c], tol).dump();
    ++checks;
    if (a != b) ++differences, failure = "generate";

    const auto path = dir / ("sid_determinism_" + std::to_string(seed) + "_" + std::to_string(c) + ".json");
    write_json_file(path.string(), generate_instance(configs[c], tol));
    std::vector<RunConfig> runs;
    for (Command cmd : {Command::CheckSI, Command::Commutant, Command::Canonicalize, Command::AlignFamily,
                        Command::K0, Command::Uniqueness}) {
      RunConfig rc;
      rc.command = cmd;
      rc.input_path = path.string();
      rc.tol = tol;
      rc.idempotent = cmd == Command::Canonicalize || cmd == Command::K0 ? "Q" : "";
      rc.family = "F";
      rc.onto = "G";
      runs.push_back(rc);
    }
    for (const RunConfig& rc : runs) {
      const RunResult x = run(rc), y = run(rc);
      ++checks;
      const auto strip = [](Json j) {
        j.erase("timing_ms");
        return j.dump();
      };
      if (x.exit_code != y.exit_code || strip(x.report) != strip(y.report)) {
        ++differences;
        failure = to_string(rc.command);
      }
    }
    std::filesystem::remove(path);
  }
  // A whole criterion pipeline, twice.
  ++checks;
  if (check_pointwise_reduction(seed, tol).metrics.dump() != check_pointwise_reduction(seed, tol).metrics.dump())
    ++differences, failure = "reduction pipeline";

  r.passed = differences == 0;
  r.detail = std::to_string(checks) + " paired runs, " + std::to_string(differences) + " differences" +
             (failure.empty() ? "" : " (last: " + failure + ")");
  r.metrics = {{"checks", checks}, {"differences", differences}};
  return finish(r, t0);
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const Tolerances& tol,
                                            const std::function<void(const CriterionResult&)>& progress) {
  using Check = CriterionResult (*)(std::uint64_t, const Tolerances&);
  const Check checks[] = {check_si_equivalence,     check_commutant_dimensions, check_pointwise_reduction,
                          check_canonical_forms,    check_k0_example,           check_uniqueness_verdicts,
                          check_determinism};
  std::vector<CriterionResult> out;
  for (std::size_t k = 0; k < std::size(checks); ++k) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = checks[k](seed + k, tol);
    } catch (const std::exception& e) {
      r.id = static_cast<int>(k + 1);
      r.name = "criterion-" + std::to_string(k + 1);
      r.passed = false;
      r.detail = std::string("aborted: ") + e.what();
      r.seconds = seconds_since(t0);
    }
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << std::fixed
     << std::setprecision(2) << r.seconds << " s): " << r.detail;
  return os.str();
}

}  // namespace sid
