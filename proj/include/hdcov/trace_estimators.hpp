#pragma once

// Unbiased estimators of tr(O1^2), tr(O2^2), tr(O1 O2), tr(O1^3), tr(O2^3),
// tr(O1^2 O2) and tr(O1 O2^2), where O_i is the covariance of the induced
// sample of group i.
//
// Everything is expressed through the centered Gram blocks: with W_ic the
// p^2 x n_i centered induced data, the sample covariance is
// W_ic W_ic' / (n_i - 1) and c_ab = W_ac' W_bc, so every trace below reduces
// to an n x n matrix expression.

#include "hdcov/gram_kernel.hpp"

namespace hdcov {

enum class Group { First, Second };

/// tr of the plug-in sample covariance of group i.
double tr_omega_i(const CenteredGramBlocks& c, Group i);

/// Plug-in tr(S_i^2) = ||c_ii||_F^2 / (n_i - 1)^2.
double tr_omega_i_sq_plugin(const CenteredGramBlocks& c, Group i);

/// Plug-in tr(S_i^3) = tr(c_ii^3) / (n_i - 1)^3.
double tr_omega_i_cu_plugin(const CenteredGramBlocks& c, Group i);

/// Plug-in tr(S_1^2 S_2) (Group::First) or tr(S_1 S_2^2) (Group::Second).
double tr_omega_sq_cross_plugin(const CenteredGramBlocks& c, Group squared);

/// Unbiased tr(O_i^2). Needs n_i >= 3.
double tr_omega_i_sq_hat(const CenteredGramBlocks& c, Group i);

/// tr(S_1 S_2), already unbiased for tr(O1 O2).
double tr_omega12_hat(const CenteredGramBlocks& c);

/// Unbiased tr(O_i^3) under normal induced samples. Throws
/// DegenerateSampleSize for n_i <= 3 where the correction factor is undefined.
double tr_omega_i_cu_hat(const CenteredGramBlocks& c, Group i);

/// Unbiased tr(O1^2 O2) (squared = First) or tr(O1 O2^2) (squared = Second).
double tr_omega_sq_cross_hat(const CenteredGramBlocks& c, Group squared);

/// All seven traces plus the two cumulant estimates. Requires n1, n2 >= 4.
/// Raw values are returned even when negative.
CumulantEstimates cumulants_hat(const CenteredGramBlocks& c);

}  // namespace hdcov
