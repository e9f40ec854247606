#include <map>

#include "doctest.h"
#include "sid/error.hpp"
#include "sid/sid_engine.hpp"
#include "test_support.hpp"

using namespace sid;

namespace {

struct Spec {
  int dim;               // 0 means an infinite atom
  double phi;            // real spectrum point
  std::optional<int> infinite_class = std::nullopt;
  bool declare_phi = true;
};

MatrixField build(Rng& rng, const std::vector<Spec>& specs) {
  std::vector<Atom> atoms;
  std::vector<std::optional<Matrix>> blocks;
  std::map<std::pair<int, double>, Matrix> shared;  // identical blocks per (dim, phi)
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Spec& s = specs[i];
    Atom a{"a" + std::to_string(i), 1.0, std::nullopt, std::nullopt, std::nullopt};
    if (s.dim > 0) {
      a.fiber_dim = s.dim;
      auto key = std::make_pair(s.dim, s.phi);
      if (!shared.count(key)) shared[key] = random_si_block(rng, s.dim, Complex(s.phi, 0.0));
      blocks.push_back(shared[key]);
    } else {
      a.infinite_class = s.infinite_class;
      if (s.declare_phi) a.spectral_value = Complex(s.phi, 0.0);
      blocks.push_back(std::nullopt);
    }
    atoms.push_back(std::move(a));
  }
  return MatrixField(AtomicSpace::build(std::move(atoms)), std::move(blocks));
}

// Independent count: multiplicity per (class, phi) with a flag for infinite atoms.
bool oracle_unique(const std::vector<Spec>& specs) {
  for (const Spec& s : specs)
    if (s.dim == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("multiplicity profile examples") {
  Rng rng = testing::rng_for(61);
  const MatrixField t = build(rng, {{2, 0.0}, {2, 0.0}, {2, 1.0}, {3, 2.0}});
  const MultiplicityProfile p = multiplicity_profile(t);
  CHECK(p.is_simple);
  REQUIRE(p.per_class.size() == 2);
  CHECK(p.per_class[0].dim == 2);
  REQUIRE(p.per_class[0].points.size() == 2);
  CHECK(*p.per_class[0].points[0].multiplicity == 2);
  CHECK(*p.per_class[0].points[1].multiplicity == 1);
  CHECK(p.per_class[0].finite_atoms == 3);
  CHECK(p.per_class[1].dim == 3);

  const MatrixField inf = build(rng, {{2, 0.0}, {0, 0.0, 2}, {0, 5.0}});
  const MultiplicityProfile q = multiplicity_profile(inf);
  CHECK(!q.is_simple);
  REQUIRE(q.per_class.size() == 2);
  CHECK(q.per_class[0].dim == 2);
  CHECK(!q.per_class[0].points[0].multiplicity);
  CHECK(q.per_class[0].points[0].atoms.size() == 2);
  CHECK(!q.per_class[1].dim);
}

TEST_CASE("mutual singularity") {
  Rng rng = testing::rng_for(62);
  CHECK(check_mutual_singularity(build(rng, {{1, 0.0}, {2, 1.0}, {3, 2.0}})));
  CHECK(!check_mutual_singularity(build(rng, {{1, 0.0}, {2, 0.0}})));
  CHECK(!check_mutual_singularity(build(rng, {{2, 4.0}, {0, 4.0, 3}})));
  // An infinite atom without a class or value never collides.
  CHECK(check_mutual_singularity(build(rng, {{2, 4.0}, {0, 4.0, std::nullopt, false}})));

  Tolerances tol;
  const double thr = tol.spec * 1.5;
  // Far inside the band: same point. Between one and ten thresholds: ambiguous.
  CHECK(!check_mutual_singularity(build(rng, {{1, 0.5}, {2, 0.5 + 0.1 * thr}}), tol));
  CHECK_THROWS_AS(check_mutual_singularity(build(rng, {{1, 0.5}, {2, 0.5 + 5 * thr}}), tol), Error);
}

TEST_CASE("uniqueness verdicts on examples") {
  Rng rng = testing::rng_for(63);
  const UniquenessVerdict a = decide_uniqueness(build(rng, {{2, 0.0}, {2, 0.0}, {3, 1.0}}));
  CHECK(a.unique);
  CHECK(a.k0_consistent);
  CHECK(a.k0.shape() == "Z^2");
  REQUIRE(a.reasons.size() == 2);
  CHECK(a.reasons[0].reason.find("simple multiplicity (max 2)") != std::string::npos);

  const UniquenessVerdict b = decide_uniqueness(build(rng, {{2, 0.0}, {0, 0.0, 2}}));
  CHECK(!b.unique);
  CHECK(b.k0_consistent);
  CHECK(b.reasons[0].reason.find("infinite multiplicity") != std::string::npos);

  const UniquenessVerdict c = decide_uniqueness(build(rng, {{1, 0.0}, {0, 3.0, std::nullopt, false}}));
  CHECK(!c.unique);
  CHECK(c.reasons.back().reason.find("Λ_∞") != std::string::npos);

  CHECK_THROWS_AS(decide_uniqueness(build(rng, {{1, 0.0}, {2, 0.0}})), Error);

  Matrix b2(2, 2);
  b2 << 1.0, 0.0, 0.0, 1.0;
  try {
    decide_uniqueness(testing::single(b2, "flat"));
    FAIL("expected NotSIForm");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSIForm);
    CHECK(e.atom() == "flat");
  }
}

TEST_CASE("random verdicts agree with the counting oracle and are monotone") {
  Rng rng = testing::rng_for(64);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Spec> specs;
    const int atoms = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < atoms; ++i) {
      const int dim = 1 + static_cast<int>(rng() % 3);
      // Points are keyed by dimension so classes stay mutually singular.
      const double phi = 10.0 * dim + static_cast<double>(rng() % 2);
      if (rng() % 5 == 0) specs.push_back({0, phi, dim});
      else specs.push_back({dim, phi});
    }
    const UniquenessVerdict v = decide_uniqueness(build(rng, specs));
    CHECK(v.unique == oracle_unique(specs));
    CHECK(v.k0_consistent);
    // Adding an infinite atom can only break uniqueness.
    specs.push_back({0, 99.0, std::nullopt, false});
    CHECK(!decide_uniqueness(build(rng, specs)).unique);
  }
}

TEST_CASE("splitting by class and by point") {
  Rng rng = testing::rng_for(65);
  const MatrixField t = build(rng, {{3, 2.0}, {1, 0.0}, {3, 2.0}, {0, 9.0}, {1, 1.0}});
  const auto parts = split_commutant_by_class(t);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].dim == 1);
  CHECK(parts[0].atoms == std::vector<std::size_t>{1, 4});
  CHECK(parts[1].atoms == std::vector<std::size_t>{0, 2});
  CHECK(!parts[2].dim);
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.atoms.size();
    for (std::size_t k = 0; k < p.atoms.size(); ++k) {
      CHECK(p.field.space()->atom(k).label == t.space()->atom(p.atoms[k]).label);
      if (t.has_block(p.atoms[k])) CHECK(testing::max_abs(p.field.block(k) - t.block(p.atoms[k])) == 0.0);
    }
  }
  CHECK(total == t.size());

  const auto subs = multiplicity_subproblems(t);
  REQUIRE(subs.size() == 3);
  CHECK(subs[0].multiplicity == 2);
  CHECK(subs[0].identical_blocks);
  CHECK(subs[0].atoms == std::vector<std::size_t>{0, 2});
  CHECK(subs[0].base.size() == 1);
}
