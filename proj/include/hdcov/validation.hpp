#pragma once

// Self-checks run by `hdcov validate`: Gram pipeline against the explicit
// Kronecker route, mixture moments against their exact values, and the
// chi-square layer against closed forms.

#include "hdcov/core_model.hpp"
#include "hdcov/sim_harness.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hdcov {

/// Field-by-field comparison at relative tolerance `tol`. Fields that can
/// cross zero are compared against a natural scale: sqrt(k2_hat) for the
/// statistic, 1 for the normalized statistic and for the p-value. Returns the
/// name of the first mismatching field.
std::optional<std::string> compare_reports(const TestReport& a,
                                           const TestReport& b, double tol);

/// A small random two-sample problem: p in [2, max_p], n_i in [4, 12], model
/// cycling through normal, t5 and chisq1, a random mixing matrix per group,
/// nonzero means, and centering on for most instances.
struct SeededInstance {
  SampleBlock x;
  SampleBlock y;
  Model model;
  bool center;
};

SeededInstance seeded_instance(std::uint64_t seed, int index, int max_p);

struct ValidationOptions {
  /// Largest p used by the explicit routes. Values above 12 are rejected.
  int max_p = 4;
  int instances = 50;
  std::size_t mixture_draws = 200000;
  std::uint64_t seed = 20240607;
  /// Negative control: multiply one cross Gram entry by (1 + 1e-6) before the
  /// pipeline continues. The oracle-equivalence check must then fail.
  bool perturb_gram = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every check; `sink` (optional) sees each result as soon as it is
/// available. Throws DimensionTooLarge for max_p > 12.
std::vector<CheckResult> run_validation(
    const ValidationOptions& options,
    const std::function<void(const CheckResult&)>& sink = {});

}  // namespace hdcov
