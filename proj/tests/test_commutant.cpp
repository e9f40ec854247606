#include "doctest.h"
#include "sid/commutant.hpp"
#include "sid/commutant_algebra.hpp"
#include "sid/error.hpp"
#include "test_support.hpp"

using namespace sid;
using testing::max_abs;

namespace {

// Residual of projecting m onto the span of the basis (trace inner product).
double span_residual(const std::vector<Matrix>& basis, const Matrix& m) {
  Matrix r = m;
  for (const Matrix& b : basis) {
    const Complex c = (b.adjoint() * r).trace();
    r -= c * b;
  }
  return r.norm();
}

}  // namespace

TEST_CASE("fiber commutant dimensions") {
  for (int n = 1; n <= 5; ++n) CHECK(fiber_commutant(Complex(0.3, 1.0) * Matrix::Identity(n, n)).dimension() == n * n);

  Matrix j(2, 2);
  j << 1.5, 1.0, 0.0, 1.5;
  CHECK(fiber_commutant(j).dimension() == 2);

  for (int n = 1; n <= 6; ++n) {
    Matrix jn = Matrix::Identity(n, n) * 0.5;
    for (int i = 0; i + 1 < n; ++i) jn(i, i + 1) = 1.0;
    const CommutantBasis c = fiber_commutant(jn);
    CHECK(c.dimension() == n);
    Matrix nil = jn - 0.5 * Matrix::Identity(n, n), power = Matrix::Identity(n, n);
    for (int k = 0; k < n; ++k, power = power * nil) CHECK(span_residual(c.basis, power) < 1e-9);
  }
}

TEST_CASE("fiber commutant agrees with an LU kernel oracle") {
  Rng rng = testing::rng_for(21);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + trial % 5;
    Matrix t = random_si_block(rng, n, uniform_complex(rng));
    for (int i = 0; i + 1 < n; ++i)
      if (uniform(rng, 0, 1) < 0.3) t(i, i + 1) = 0.0;
    const CommutantBasis c = fiber_commutant(t);
    CHECK(c.dimension() == testing::commutant_dimension(t));
    for (const Matrix& b : c.basis) {
      CHECK((t * b - b * t).norm() <= 1e-9 * std::max(1.0, t.norm()) * b.norm());
    }
    // Orthonormal in the trace inner product.
    for (std::size_t a = 0; a < c.basis.size(); ++a)
      for (std::size_t b = 0; b < c.basis.size(); ++b) {
        const Complex ip = (c.basis[a].adjoint() * c.basis[b]).trace();
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-9);
      }
  }
}

TEST_CASE("fiber commutant respects the size limit") {
  Tolerances tol;
  tol.max_dim = 3;
  CHECK_THROWS_AS(fiber_commutant(Matrix::Identity(4, 4), tol), Error);
}

TEST_CASE("distinct spectral values decouple; identical blocks couple") {
  Rng rng = testing::rng_for(22);
  const Matrix a = random_si_block(rng, 2, 0.0), b = random_si_block(rng, 2, 1.0);
  auto space = build_space({{"a", 1.0, 2}, {"b", 1.0, 2}});
  const MatrixField t(space, {a, b});
  const CommutantStructure s = field_commutant_structure(t);
  CHECK(s.classes.size() == 2);
  // Full coupled kernel equals the sum of the fiber dimensions: no cross terms.
  const Matrix sum = direct_sum({a, b});
  CHECK(testing::commutant_dimension(sum) == 4);
  CHECK(s.total_dimension() == 4);
  const Matrix kernel = testing::sylvester_kernel(sum, sum);
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    const Matrix x = Eigen::Map<const Matrix>(kernel.col(c).data(), 4, 4);
    CHECK(max_abs(x.topRightCorner(2, 2)) < 1e-9);
    CHECK(max_abs(x.bottomLeftCorner(2, 2)) < 1e-9);
  }

  const MatrixField same(space, {a, a});
  const CommutantStructure s2 = field_commutant_structure(same);
  REQUIRE(s2.classes.size() == 1);
  REQUIRE(s2.classes[0].groups.size() == 1);
  const int brute = testing::commutant_dimension(direct_sum({a, a}));
  CHECK(brute == 8);
  CHECK(s2.classes[0].groups[0].coupled_dimension() == brute);
  CHECK(s2.total_dimension() == brute);

  const MatrixField one = testing::single(a);
  CHECK(field_commutant_structure(one).classes.size() == 1);
}

TEST_CASE("structure prediction matches the full solve on small instances") {
  Rng rng = testing::rng_for(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int atoms = 1 + trial % 4;
    std::vector<AtomDescription> desc;
    std::vector<std::optional<Matrix>> blocks;
    Matrix shared = random_si_block(rng, 2, 0.25);
    for (int i = 0; i < atoms; ++i) {
      const int pick = static_cast<int>(rng() % 3);
      Matrix b = pick == 0 ? shared : random_si_block(rng, 1 + static_cast<int>(rng() % 3), Complex(1.0 + i, 0.0));
      desc.push_back({"x" + std::to_string(i), 1.0, static_cast<int>(b.rows())});
      blocks.push_back(b);
    }
    const MatrixField t(build_space(desc), blocks);
    std::vector<Matrix> all;
    for (const auto& b : blocks) all.push_back(*b);
    const CommutantStructure s = field_commutant_structure(t, {}, true);
    CHECK(s.total_dimension() == testing::commutant_dimension(direct_sum(all)));
  }
}

TEST_CASE("spectral clustering refuses the ambiguity band") {
  Tolerances tol;
  const double thr = tol.spec * (1.0 + 0.5 + 5 * tol.spec);
  CHECK_THROWS_AS(cluster_spectral_values({0.5, 0.5 + 5 * tol.spec}, tol), Error);
  CHECK(cluster_spectral_values({0.5, 0.5 + thr * 0.1}, tol) == std::vector<int>{0, 0});
  CHECK(cluster_spectral_values({0.5, 0.6, 0.5}, tol) == std::vector<int>{0, 1, 0});
}

TEST_CASE("commuting fields are triangular with constant diagonal") {
  Rng rng = testing::rng_for(24);
  auto space = build_space({{"a", 1.0, 3}, {"b", 1.0, 2}});
  const MatrixField t = MatrixField::from_blocks(space, [&](std::size_t i) {
    return random_si_block(rng, space->atom(i).dim(), Complex(double(i), 0.0));
  });
  const SITriangularForm form = validate_si_form(t);
  CHECK(verify_commuting_triangular_form(form, MatrixField::identity(space)));
  const Complex psi(0.4, -0.3);
  const MatrixField x = MatrixField::from_blocks(space, [&](std::size_t i) {
    return Matrix(form.nilpotent(i) + psi * Matrix::Identity(form.nilpotent(i).rows(), form.nilpotent(i).rows()));
  });
  CHECK(verify_commuting_triangular_form(form, x));
  // A generic commutant element from the kernel oracle has the same shape.
  const MatrixField y = MatrixField::from_blocks(space, [&](std::size_t i) {
    const Matrix k = testing::sylvester_kernel(t.block(i), t.block(i));
    const Vector v = k * Vector::Random(k.cols());
    const int n = space->atom(i).dim();
    return Matrix(Eigen::Map<const Matrix>(v.data(), n, n));
  });
  CHECK(verify_commuting_triangular_form(form, y));
  MatrixField lower = MatrixField::identity(space);
  Matrix l = Matrix::Identity(3, 3);
  l(2, 0) = 1.0;
  lower = MatrixField(space, {l, Matrix::Identity(2, 2)});
  CHECK_FALSE(verify_commuting_triangular_form(form, lower));
}

TEST_CASE("idempotents of an injective SI field are 0/I per atom (brute force)") {
  Rng rng = testing::rng_for(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_si_block(rng, 2, 0.0), b = random_si_block(rng, 2, 1.0);
    const Matrix sum = direct_sum({a, b});
    const Matrix k = testing::sylvester_kernel(sum, sum);
    Vector c(k.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = uniform_complex(rng);
    const Vector v = k * c;
    const Matrix x = Eigen::Map<const Matrix>(v.data(), 4, 4);
    // Spectrum is one point per atom; map those to 0 and 1 and refine.
    const Complex l0 = x(0, 0), l1 = x(2, 2);
    const Matrix p = testing::newton_idempotent((x - l0 * Matrix::Identity(4, 4)) / (l1 - l0));
    CHECK(max_abs(p * p - p) < 1e-9);
    CHECK(max_abs(p.topLeftCorner(2, 2)) < 1e-9);
    CHECK(max_abs(p.bottomRightCorner(2, 2) - Matrix::Identity(2, 2)) < 1e-9);
    CHECK(max_abs(p.topRightCorner(2, 2)) < 1e-9);
  }
}

TEST_CASE("commutant algebra series round-trip and arithmetic") {
  Rng rng = testing::rng_for(26);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4, m = 1 + (trial / 4) % 3;
    const Matrix t = random_si_block(rng, n, uniform_complex(rng));
    const CommutantAlgebra alg(Matrix(t - t(0, 0) * Matrix::Identity(n, n)));
    const Series x = random_invertible_series(rng, alg, m);
    const Series y = random_invertible_series(rng, alg, m);
    const Matrix ex = alg.expand(x), ey = alg.expand(y);
    // Expanded elements commute with the amplified operator.
    const Matrix tm = testing::kron(Matrix::Identity(m, m), t);
    CHECK(max_abs(tm * ex - ex * tm) < 1e-12 * 100);
    double residual = 1.0;
    const Series back = alg.decompose(ex, m, &residual);
    CHECK(residual < 1e-12);
    for (int k = 0; k < n; ++k) CHECK(max_abs(back[k] - x[k]) < 1e-10);
    CHECK(max_abs(alg.expand(alg.multiply(x, y)) - ex * ey) < 1e-10);
    CHECK(max_abs(alg.expand(alg.inverse(x)) - ex.inverse()) < 1e-8);
    const Matrix p = alg.copy_to_position(m);
    CHECK(max_abs(p * ex * p.transpose() - alg.expand_position_major(x)) == 0.0);
  }
}

TEST_CASE("fiber commutants are closed under multiplication") {
  Rng rng = testing::rng_for(27);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    Matrix block = random_si_block(rng, n, uniform_complex(rng));
    // Every third block is reducible: zero one superdiagonal entry.
    if (n > 1 && trial % 3 == 0) block(trial % (n - 1), trial % (n - 1) + 1) = 0.0;
    const CommutantBasis c = fiber_commutant(block);
    for (const Matrix& a : c.basis)
      for (const Matrix& b : c.basis) CHECK(span_residual(c.basis, a * b) < 1e-9);
  }
}
