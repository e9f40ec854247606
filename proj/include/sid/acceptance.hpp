#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sid/json_io.hpp"
#include "sid/tolerances.hpp"

namespace sid {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  Json metrics = Json::object();
};

inline constexpr std::uint64_t kAcceptanceSeed = 20240611;

CriterionResult check_si_equivalence(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_commutant_dimensions(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_pointwise_reduction(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_canonical_forms(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_k0_example(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_uniqueness_verdicts(std::uint64_t seed, const Tolerances& tol = {});
CriterionResult check_determinism(std::uint64_t seed, const Tolerances& tol = {});

/// Runs every criterion in order; `progress` sees each result as it finishes.
std::vector<CriterionResult> run_acceptance(
    std::uint64_t seed, const Tolerances& tol = {},
    const std::function<void(const CriterionResult&)>& progress = {});

/// "[PASS] 1 si-equivalence (0.42 s): detail"
std::string format_line(const CriterionResult& r);

}  // namespace sid
