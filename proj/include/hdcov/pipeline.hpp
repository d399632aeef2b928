#pragma once

#include "hdcov/core_model.hpp"
#include "hdcov/gram_kernel.hpp"

namespace hdcov {

struct TestOptions {
  /// Subtract each group's sample mean first. Off only for the known-zero-mean
  /// setting.
  bool center = true;
};

/// Full test: validation, optional centering, Gram blocks, statistic,
/// cumulant estimates, matched chi-square p-value.
///
/// Throws NonpositiveVariance when the data are degenerate (K2 estimate <= 0)
/// and DegenerateSampleSize when a group has fewer than 4 observations.
TestReport run_test(const SampleBlock& x, const SampleBlock& y,
                    const TestOptions& options = {});

/// Everything after the Gram step. Exposed so checks can feed modified blocks.
TestReport report_from_gram(const GramBlocks& g, Eigen::Index p,
                            bool centered);

}  // namespace hdcov
