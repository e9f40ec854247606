#pragma once

namespace sid {

/// Numerical thresholds shared by every module. Defaults are the documented
/// project values; the CLI can override each one.
struct Tolerances {
  double diag = 1e-9;      ///< constant-diagonal / triangularity check, relative to max(1, block norm)
  double sing = 1e-10;     ///< smallest/largest singular value below which a block is singular
  double zero = 1e-9;      ///< superdiagonal entry counts as zero when |x| <= zero * (1 + block norm)
  double eig = 1e-7;       ///< base eigenvalue clustering tolerance, relative to spectral radius
  double spec = 1e-8;      ///< spectral-value clustering, scaled by (1 + max|phi|)
  double null = 1e-10;     ///< Sylvester nullspace threshold, relative to the largest singular value
  double rank = 1e-8;      ///< numerical rank threshold for idempotents, relative to sigma_max
  double idem = 1e-8;      ///< ||Q^2 - Q|| <= idem * (1 + ||Q||^2)
  double commute = 1e-8;   ///< ||AX - XA|| <= commute * ||A|| * ||X||
  double kappa_max = 1e6;  ///< cap on accepted or generated certificate conditioning
  double integer_gate = 1e-6;
  int max_dim = 16;        ///< largest fiber dimension for n^2 x n^2 Sylvester solves
};

}  // namespace sid
