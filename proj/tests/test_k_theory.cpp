#include "doctest.h"
#include "sid/error.hpp"
#include "sid/k_theory.hpp"
#include "test_support.hpp"

using namespace sid;

namespace {

// Atoms a0..a(k-1); atoms listed in `shared` reuse the value of the atom before them.
MatrixField multiplication_operator(Rng& rng, int n, int atoms, const std::vector<int>& point_of) {
  std::vector<AtomDescription> desc;
  for (int i = 0; i < atoms; ++i) desc.push_back({"a" + std::to_string(i), 1.0, n});
  auto space = build_space(desc);
  std::vector<Matrix> by_point;
  return MatrixField::from_blocks(space, [&](std::size_t i) {
    const int p = point_of[i];
    while (static_cast<int>(by_point.size()) <= p)
      by_point.push_back(random_si_block(rng, n, Complex(0.5 * by_point.size(), -0.2)));
    return by_point[p];
  });
}

// Q = G diag(1^r, 0^(m-r)) G^-1 per atom with ranks[i] given.
IdempotentField with_ranks(Rng& rng, const MatrixField& t, int m, const std::vector<int>& ranks) {
  const auto alg = commutant_algebras(t);
  MatrixField q = MatrixField::from_blocks(t.space()->amplified(m), [&](std::size_t i) {
    const CommutantAlgebra& a = *alg[i];
    Matrix d = Matrix::Zero(m, m);
    for (int k = 0; k < ranks[i]; ++k) d(k, k) = 1.0;
    const Series g = random_invertible_series(rng, a, m);
    return a.expand(a.conjugate(g, a.constant(d), a.inverse(g)));
  });
  return IdempotentField::make(q, t);
}

}  // namespace

TEST_CASE("zero and identity classes") {
  Rng rng = testing::rng_for(51);
  const MatrixField t = multiplication_operator(rng, 2, 3, {0, 1, 2});
  const K0Class zero = trace_class(IdempotentField::make(MatrixField::zero(t.space()->amplified(2)), t));
  CHECK(zero.values == std::vector<long long>{0, 0, 0});
  const K0Class one = trace_class(IdempotentField::make(MatrixField::identity(t.space()->amplified(2)), t));
  CHECK(one.values == std::vector<long long>{2, 2, 2});
}

TEST_CASE("indicator of a set of atoms gives its characteristic pattern") {
  Rng rng = testing::rng_for(52);
  const MatrixField t = multiplication_operator(rng, 3, 6, {0, 1, 2, 3, 4, 5});
  for (unsigned mask = 0; mask < 64; mask += 5) {
    const MatrixField chi = MatrixField::from_blocks(t.space(), [&](std::size_t i) {
      return (mask >> i & 1u) ? Matrix(Matrix::Identity(3, 3)) : Matrix(Matrix::Zero(3, 3));
    });
    const K0Class c = trace_class(IdempotentField::make(chi, t));
    for (std::size_t i = 0; i < 6; ++i) CHECK(c.at(i) == static_cast<long long>(mask >> i & 1u));
  }
}

TEST_CASE("class counts ranks over the atoms at each point") {
  Rng rng = testing::rng_for(53);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3, m = 1 + trial % 4, atoms = 2 + trial % 5;
    std::vector<int> point_of(atoms), ranks(atoms);
    for (int i = 0; i < atoms; ++i) {
      point_of[i] = static_cast<int>(rng() % 3);
      ranks[i] = static_cast<int>(rng() % (m + 1));
    }
    // Renumber points in first-appearance order, which is how the support is listed.
    std::vector<int> seen;
    for (int& p : point_of) {
      auto it = std::find(seen.begin(), seen.end(), p);
      if (it == seen.end()) {
        seen.push_back(p);
        p = static_cast<int>(seen.size()) - 1;
      } else {
        p = static_cast<int>(it - seen.begin());
      }
    }
    const MatrixField t = multiplication_operator(rng, n, atoms, point_of);
    const K0Class c = trace_class(with_ranks(rng, t, m, ranks));
    std::vector<long long> expected(seen.size(), 0);
    for (int i = 0; i < atoms; ++i) expected[point_of[i]] += ranks[i];
    CHECK(c.values == expected);
    CHECK(c.max_rounding < 1e-8);
  }
}

TEST_CASE("additivity, similarity invariance and stability") {
  Rng rng = testing::rng_for(54);
  const MatrixField t = multiplication_operator(rng, 2, 4, {0, 1, 1, 2});
  const auto alg = commutant_algebras(t);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3;
    // Two orthogonal idempotents from one conjugated standard decomposition.
    std::vector<Series> g(4), gi(4);
    for (std::size_t i = 0; i < 4; ++i) {
      g[i] = random_invertible_series(rng, *alg[i], m);
      gi[i] = alg[i]->inverse(g[i]);
    }
    auto piece = [&](std::vector<int> bits) {
      return IdempotentField::make(MatrixField::from_blocks(t.space()->amplified(m), [&](std::size_t i) {
        Matrix d = Matrix::Zero(m, m);
        for (int k = 0; k < m; ++k) d(k, k) = bits[k];
        return alg[i]->expand(alg[i]->conjugate(g[i], alg[i]->constant(d), gi[i]));
      }), t);
    };
    const IdempotentField p = piece({1, 0, 0}), q = piece({0, 1, 1});
    const IdempotentField sum = IdempotentField::make(field_add(p.field, q.field), t);
    const K0Class cp = trace_class(p), cq = trace_class(q), cs = trace_class(sum);
    for (std::size_t k = 0; k < cs.values.size(); ++k) CHECK(cs.at(k) == cp.at(k) + cq.at(k));

    // Conjugating by another invertible element does not change the class.
    const IdempotentField moved = IdempotentField::make(MatrixField::from_blocks(t.space()->amplified(m), [&](std::size_t i) {
      const Series h = random_invertible_series(rng, *alg[i], m);
      return Matrix(alg[i]->expand(h) * q.field.block(i) * alg[i]->expand(alg[i]->inverse(h)));
    }), t);
    CHECK(k0_equal(q, moved));

    // p (+) 0 in M_(m+1).
    const IdempotentField padded = IdempotentField::make(MatrixField::from_blocks(t.space()->amplified(m + 1), [&](std::size_t i) {
      Matrix b = Matrix::Zero(2 * (m + 1), 2 * (m + 1));
      b.topLeftCorner(2 * m, 2 * m) = p.field.block(i);
      return b;
    }), t);
    CHECK(trace_class(padded) == cp);
  }
}

TEST_CASE("descriptor shape and zero contributions") {
  Rng rng = testing::rng_for(55);
  const MatrixField t = multiplication_operator(rng, 2, 5, {0, 1, 1, 2, 3});
  const K0Descriptor d = k0_descriptor(t);
  CHECK(d.rank() == 4);
  CHECK(d.shape() == "Z^4");
  CHECK(d.zero_contributions.empty());
  CHECK(d.generators.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(d.point_dimensions[k] == 2);
    for (std::size_t j = 0; j < 4; ++j) CHECK(d.generators[k].at(j) == (j == k ? 1 : 0));
  }
  CHECK(k0_descriptor(multiplication_operator(rng, 1, 2, {0, 0})).shape() == "Z");

  std::vector<Atom> atoms{{"x", 1.0, 2, std::nullopt, std::nullopt},
                          {"y", 1.0, std::nullopt, 2, Complex(3.0, 0.0)},
                          {"z", 1.0, std::nullopt, std::nullopt, std::nullopt}};
  Matrix b(2, 2);
  b << 0.0, 1.0, 0.0, 0.0;
  const MatrixField mixed(AtomicSpace::build(atoms), {b, std::nullopt, std::nullopt});
  const K0Descriptor dm = k0_descriptor(mixed);
  CHECK(dm.shape() == "Z");
  REQUIRE(dm.zero_contributions.size() == 2);
  CHECK(dm.zero_contributions[0].atom == "y");
  CHECK(dm.zero_contributions[0].dimension_class == 2);
  CHECK(!dm.zero_contributions[1].dimension_class);
}

TEST_CASE("trace gates and operator mismatch") {
  Rng rng = testing::rng_for(56);
  const MatrixField t = multiplication_operator(rng, 1, 2, {0, 1});
  // Off the idempotent manifold: passes the idempotency gate loosely but the trace is not an integer.
  IdempotentField bad{MatrixField(t.space(), {Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 1.0)}), t, 1, 1.0};
  try {
    trace_class(bad);
    FAIL("expected a trace error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::InconsistentTrace || e.kind() == ErrorKind::NonIntegerClass));
  }
  const MatrixField t2 = multiplication_operator(rng, 2, 2, {0, 1});
  const MatrixField other = multiplication_operator(rng, 2, 2, {0, 1});
  const IdempotentField p = IdempotentField::make(MatrixField::identity(t2.space()), t2);
  const IdempotentField q = IdempotentField::make(MatrixField::identity(other.space()), other);
  try {
    k0_equal(p, q);
    FAIL("expected DifferentBaseOperator");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DifferentBaseOperator);
  }
}
