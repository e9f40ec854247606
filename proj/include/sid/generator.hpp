#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sid/commutant_algebra.hpp"
#include "sid/json_io.hpp"
#include "sid/tolerances.hpp"

namespace sid {

using Rng = std::mt19937_64;

/// Instance layout: per dimension class, the multiplicity of each spectrum
/// point (empty = infinite). `dim` empty marks Λ_∞ atoms.
struct ClassPattern {
  std::optional<int> dim;
  std::vector<std::optional<int>> points;
};

/// Grammar: "1,1,2" (one class of dimension `default_n`), or
/// "2:1,2;3:inf;inf:1" with "inf:k" adding k atoms of no finite class.
std::vector<ClassPattern> parse_pattern(const std::string& pattern, int default_n);

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int n = 2;
  int m = 2;
  int atoms = 3;        // used when `pattern` is empty: that many simple points
  std::string pattern;
};

/// Deterministic instance: operator "T", seeded idempotent "Q" over T^(m),
/// two conjugated standard families "F" and "G", and ground truth under "truth".
Json generate_instance(const GeneratorConfig& config, const Tolerances& tol = {});

// Sampling helpers shared with the tests and the acceptance suite.

double uniform(Rng& rng, double lo, double hi);
Complex uniform_complex(Rng& rng);  // both parts in [-1, 1]
Matrix random_unitary(Rng& rng, int n);
/// Upper-triangular block with diagonal phi and |superdiagonal| in [0.1, 1].
Matrix random_si_block(Rng& rng, int n, Complex phi);
/// Invertible element of M_m({T}') with condition number of its expansion
/// at most `kappa_cap`.
Series random_invertible_series(Rng& rng, const CommutantAlgebra& algebra, int m,
                                double kappa_cap = 100.0);

}  // namespace sid
