#include "doctest.h"
#include "sid/error.hpp"
#include "sid/idempotent_reduction.hpp"
#include "test_support.hpp"

using namespace sid;
using testing::max_abs;

namespace {

struct Setup {
  MatrixField t;
  std::vector<std::optional<CommutantAlgebra>> alg;
};

Setup make_operator(Rng& rng, int atoms, int n) {
  std::vector<AtomDescription> desc;
  for (int i = 0; i < atoms; ++i) desc.push_back({"p" + std::to_string(i), 1.0, n});
  auto space = build_space(desc);
  MatrixField t = MatrixField::from_blocks(space, [&](std::size_t i) {
    return random_si_block(rng, n, Complex(0.9 * double(i), 0.1));
  });
  auto alg = commutant_algebras(t);
  return {std::move(t), std::move(alg)};
}

Matrix diag01(const std::vector<int>& bits) {
  Matrix d = Matrix::Zero(bits.size(), bits.size());
  for (std::size_t a = 0; a < bits.size(); ++a) d(a, a) = bits[a];
  return d;
}

// Seeded idempotent G diag(bits) G^-1 per atom, plus the seeded ranks.
IdempotentField seeded(Rng& rng, const Setup& s, int m, std::vector<int>& ranks) {
  ranks.assign(s.t.size(), 0);
  MatrixField q = MatrixField::from_blocks(s.t.space()->amplified(m), [&](std::size_t i) {
    const CommutantAlgebra& a = *s.alg[i];
    std::vector<int> bits(m);
    for (int& b : bits) {
      b = static_cast<int>(rng() % 2);
      ranks[i] += b;
    }
    const Series g = random_invertible_series(rng, a, m);
    return a.expand(a.conjugate(g, a.constant(diag01(bits)), a.inverse(g)));
  });
  return IdempotentField::make(q, s.t);
}

std::vector<IdempotentField> conjugated_standard(Rng& rng, const Setup& s, int m) {
  std::vector<std::optional<Series>> g(s.t.size()), gi(s.t.size());
  for (std::size_t i : s.t.finite_atoms()) {
    g[i] = random_invertible_series(rng, *s.alg[i], m);
    gi[i] = s.alg[i]->inverse(*g[i]);
  }
  std::vector<IdempotentField> out;
  for (int a = 0; a < m; ++a) {
    MatrixField f = MatrixField::from_blocks(s.t.space()->amplified(m), [&](std::size_t i) {
      std::vector<int> bits(m, 0);
      bits[a] = 1;
      return s.alg[i]->expand(s.alg[i]->conjugate(*g[i], s.alg[i]->constant(diag01(bits)), *gi[i]));
    });
    out.push_back(IdempotentField::make(f, s.t));
  }
  return out;
}

}  // namespace

TEST_CASE("pointwise reduction examples") {
  const Complex r(0.7, -2.0);
  Matrix p(2, 2);
  p << 1.0, r, 0.0, 0.0;
  const PointwiseReduction red = reduce_pointwise(p);
  CHECK(red.rank == 1);
  CHECK(max_abs(red.projection - diag01({1, 0})) == 0.0);
  Matrix y(2, 2);
  y << 1.0, r, 0.0, 1.0;
  CHECK(max_abs(red.y - y) < 1e-14);
  CHECK(max_abs(red.y * p * red.y_inv - red.projection) < 1e-14);

  const PointwiseReduction zero = reduce_pointwise(Matrix::Zero(3, 3));
  CHECK(zero.rank == 0);
  CHECK(max_abs(zero.projection) == 0.0);
  CHECK(max_abs(zero.y - Matrix::Identity(3, 3)) == 0.0);

  Matrix not_idem = Matrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(reduce_pointwise(not_idem), Error);
}

TEST_CASE("pointwise reduction on random conjugated idempotents") {
  Rng rng = testing::rng_for(31);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + trial % 6;
    const int rank = static_cast<int>(rng() % (n + 1));
    const Matrix v = testing::random_conditioned(rng, n, 100.0);
    Matrix d = Matrix::Zero(n, n);
    d.topLeftCorner(rank, rank).setIdentity();
    const Matrix p = v * d * v.inverse();
    const PointwiseReduction red = reduce_pointwise(p);
    CHECK(red.rank == rank);
    CHECK(max_abs(red.y * p * red.y_inv - red.projection) < 1e-9);
    CHECK(max_abs(red.y * red.y_inv - Matrix::Identity(n, n)) < 1e-9);
    CHECK(linalg::singular_values(red.y)(0) <= (1.0 + linalg::singular_values(p)(0)) * (1 + 1e-12));
    // Y is shear times unitary.
    CHECK(max_abs(red.unitary * red.unitary.adjoint() - Matrix::Identity(n, n)) < 1e-12);
    CHECK(max_abs(red.shear * red.unitary - red.y) < 1e-12);
  }
}

TEST_CASE("idempotent field validation") {
  Rng rng = testing::rng_for(32);
  Setup s = make_operator(rng, 2, 2);
  const MatrixField twice = field_scale(MatrixField::identity(s.t.space()->amplified(2)), 2.0);
  CHECK_THROWS_AS(IdempotentField::make(twice, s.t), Error);
  // An idempotent that does not commute with T^(2).
  MatrixField wrong = MatrixField::from_blocks(s.t.space()->amplified(2), [](std::size_t) {
    Matrix e = Matrix::Zero(4, 4);
    e(0, 0) = 1.0;
    return e;
  });
  try {
    IdempotentField::make(wrong, s.t);
    FAIL("expected NotInCommutant");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInCommutant);
  }
}

TEST_CASE("canonicalization fixed point and example shapes") {
  Rng rng = testing::rng_for(33);
  Setup s = make_operator(rng, 3, 2);
  const int m = 3;
  const MatrixField p = MatrixField::from_blocks(s.t.space()->amplified(m), [&](std::size_t i) {
    return testing::kron(diag01({1, i % 2 ? 1 : 0, 0}), Matrix::Identity(2, 2));
  });
  const Canonicalization c = canonicalize_in_commutant(IdempotentField::make(p, s.t));
  CHECK(c.projection.field.max_abs_difference(p) == 0.0);
  for (std::size_t i : s.t.finite_atoms()) CHECK(max_abs(c.certificate.x.block(i) - Matrix::Identity(6, 6)) < 1e-15);

  // m = 1 on the two-by-two multiplication operator: only 0 and I survive.
  std::vector<AtomDescription> desc;
  for (int j = 0; j < 4; ++j) desc.push_back({"z" + std::to_string(j), 0.25, 2});
  auto space = build_space(desc);
  const MatrixField t = MatrixField::from_blocks(space, [](std::size_t j) {
    const double z = (j + 0.5) / 4.0;
    Matrix b(2, 2);
    b << z, 1.0 + z * z, 0.0, z;
    return b;
  });
  const MatrixField q = MatrixField::from_blocks(space, [](std::size_t j) {
    return j % 2 ? Matrix(Matrix::Identity(2, 2)) : Matrix(Matrix::Zero(2, 2));
  });
  const Canonicalization cm = canonicalize_in_commutant(IdempotentField::make(q, t));
  for (std::size_t j : t.finite_atoms()) {
    const Matrix& b = cm.projection.field.block(j);
    CHECK((max_abs(b) == 0.0 || max_abs(b - Matrix::Identity(2, 2)) == 0.0));
  }
}

TEST_CASE("seeded idempotents canonicalize with exact rank profiles and valid certificates") {
  Rng rng = testing::rng_for(34);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 3, m = 1 + (trial / 3) % 3, atoms = 1 + trial % 5;
    Setup s = make_operator(rng, atoms, n);
    std::vector<int> ranks;
    const IdempotentField q = seeded(rng, s, m, ranks);
    const RankProfile prof = rank_profile(q);
    const Canonicalization c = canonicalize_in_commutant(q);
    const MatrixField tm = amplify(s.t, m);
    for (std::size_t i : s.t.finite_atoms()) {
      CHECK(*prof.per_atom[i] == ranks[i]);
      const Matrix& x = c.certificate.x.block(i);
      const Matrix& xi = c.certificate.x_inv.block(i);
      const Matrix& p = c.projection.field.block(i);
      // Conjugation, membership and inverse, checked directly.
      CHECK(max_abs(x * q.field.block(i) * xi - p) < 1e-9);
      CHECK((tm.block(i) * x - x * tm.block(i)).norm() <= 1e-8 * tm.block(i).norm() * x.norm());
      CHECK(max_abs(x * xi - Matrix::Identity(n * m, n * m)) <= c.certificate.condition[i] * 1e-12 * 10);
      // Diagonal 0/1, self-adjoint, nested, rank preserved.
      CHECK(max_abs(p - p.adjoint()) == 0.0);
      int ones = 0;
      for (int a = 0; a < m; ++a) {
        const Complex v = p(a * n, a * n);
        CHECK((v == Complex(0.0) || v == Complex(1.0)));
        ones += v == Complex(1.0);
        if (a > 0 && v == Complex(1.0)) CHECK(p((a - 1) * n, (a - 1) * n) == Complex(1.0));
      }
      CHECK(ones == ranks[i]);
    }
    // The construction log multiplies out to the certificate.
    MatrixField prod = MatrixField::identity(s.t.space()->amplified(m));
    for (const LogEntry& e : c.certificate.construction_log) prod = field_mul(e.factor, prod);
    CHECK(prod.max_abs_difference(c.certificate.x) < 1e-9);
    CHECK(c.certificate.construction_log.front().name == "U1");
    CHECK(c.certificate.construction_log.back().name == "U1*");
  }
}

TEST_CASE("canonicalizing a canonical projection is the identity") {
  Rng rng = testing::rng_for(35);
  for (int trial = 0; trial < 20; ++trial) {
    Setup s = make_operator(rng, 3, 2);
    std::vector<int> ranks;
    const IdempotentField q = seeded(rng, s, 3, ranks);
    const Canonicalization once = canonicalize_in_commutant(q);
    const Canonicalization twice = canonicalize_in_commutant(once.projection);
    CHECK(twice.projection.field.max_abs_difference(once.projection.field) == 0.0);
    for (std::size_t i : s.t.finite_atoms())
      CHECK(max_abs(twice.certificate.x.block(i) - Matrix::Identity(6, 6)) < 1e-12);
  }
}

TEST_CASE("rank profile basics") {
  Rng rng = testing::rng_for(36);
  Setup s = make_operator(rng, 3, 2);
  const auto space3 = s.t.space()->amplified(3);
  const RankProfile full = rank_profile(IdempotentField::make(MatrixField::identity(space3), s.t));
  for (const auto& r : full.per_atom) CHECK(*r == 3);
  CHECK(full.is_constant);
  const RankProfile none = rank_profile(IdempotentField::make(MatrixField::zero(space3), s.t));
  for (const auto& r : none.per_atom) CHECK(*r == 0);

  // A rank-1 idempotent on a 2-dimensional fiber is not in the commutant of an SI block.
  IdempotentField odd{MatrixField(build_space({{"a", 1.0, 2}}), {diag01({1, 0})}), testing::single(Matrix::Identity(2, 2)), 1, 1.0};
  CHECK_THROWS_AS(rank_profile(odd), Error);
}

TEST_CASE("minimal family extraction") {
  Rng rng = testing::rng_for(37);
  Setup s = make_operator(rng, 2, 2);
  const auto std2 = standard_family(s.t, 2);
  const auto min2 = extract_minimal_family(std2, 2);
  REQUIRE(min2.size() == 2);
  for (int a = 0; a < 2; ++a) {
    bool matched = false;
    for (const auto& e : std2) matched = matched || min2[a].field.max_abs_difference(e.field) < 1e-14;
    CHECK(matched);
  }

  for (int trial = 0; trial < 20; ++trial) {
    const auto fam = conjugated_standard(rng, s, 3);
    const auto min = extract_minimal_family(fam, 3);
    REQUIRE(min.size() == 3);
    for (std::size_t i : s.t.finite_atoms()) {
      for (int a = 0; a < 3; ++a) {
        CHECK(linalg::numerical_rank(min[a].field.block(i), 1e-8) == 2);
        for (int b = 0; b < 3; ++b)
          if (a != b) CHECK(max_abs(min[a].field.block(i) * min[b].field.block(i)) < 1e-9);
      }
    }
  }

  // Defect: on one atom the only member is the identity, so nothing cuts it.
  auto fam = conjugated_standard(rng, s, 2);
  MatrixField broken = MatrixField::from_blocks(s.t.space()->amplified(2), [&](std::size_t i) {
    return i == 1 ? Matrix(Matrix::Identity(4, 4)) : fam[0].field.block(i);
  });
  try {
    extract_minimal_family({IdempotentField::make(broken, s.t)}, 2);
    FAIL("expected FamilyNotMaximal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FamilyNotMaximal);
    CHECK(e.atom() == "p1");
  }

  // Non-commuting members.
  const auto f1 = conjugated_standard(rng, s, 2), f2 = conjugated_standard(rng, s, 2);
  try {
    extract_minimal_family({f1[0], f2[0]}, 2);
    FAIL("expected NotAbelian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAbelian);
  }
}

TEST_CASE("family alignment and composition") {
  Rng rng = testing::rng_for(38);
  Setup s = make_operator(rng, 3, 2);
  const Alignment id = align_family(standard_family(s.t, 2));
  for (std::size_t i : s.t.finite_atoms()) CHECK(max_abs(id.certificate.x.block(i) - Matrix::Identity(4, 4)) < 1e-14);

  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 2;
    const auto f = conjugated_standard(rng, s, m);
    const Alignment a = align_family(f);
    const auto std_m = standard_family(s.t, m);
    for (int k = 0; k < m; ++k) {
      const MatrixField img = field_mul(field_mul(a.certificate.x, a.minimal[k].field), a.certificate.x_inv);
      CHECK(img.max_abs_difference(std_m[k].field) < 1e-9);
    }
    const auto g = conjugated_standard(rng, s, m);
    const FamilyMap map = map_family_onto(f, g);
    CHECK(map.residual < 1e-6);
    CHECK(map.certificate.commutation_residual < 1e-8);
    // Each member of f maps to an idempotent commuting with all of g.
    for (const auto& fi : f) {
      const MatrixField img = field_mul(field_mul(map.certificate.x, fi.field), map.certificate.x_inv);
      for (const auto& gj : g) {
        const MatrixField c = field_sub(field_mul(img, gj.field), field_mul(gj.field, img));
        CHECK(c.max_abs_difference(MatrixField::zero(c.space())) < 1e-8);
      }
    }
  }
}
