#pragma once

// Ground-truth routes used to check the Gram pipeline:
//  * explicit induced vectors y (x) y at small p, with every trace taken on
//    the p^2 x p^2 sample covariance matrices;
//  * the exact covariance of y (x) y for the simulation models;
//  * a sampler for the chi-square-type mixture that is the exact law of the
//    statistic when the induced samples are normal.

#include "hdcov/core_model.hpp"
#include "hdcov/rng.hpp"
#include "hdcov/sim_harness.hpp"

#include <cstdint>
#include <vector>

namespace hdcov {

inline constexpr Eigen::Index kMaxExplicitDim = 12;

/// Row j is y_j (x) y_j. Throws DimensionTooLarge for p > 12.
Matrix explicit_induced(const SampleBlock& x);

/// Sample mean and unbiased sample covariance of explicit induced rows.
struct ExplicitMoments {
  Vector mean;
  Matrix cov;
};

ExplicitMoments explicit_moments(const Matrix& w);

/// Every estimator evaluated on explicit p^2 x p^2 matrices.
struct BruteForceResult {
  double statistic = 0.0;
  double tr_s1 = 0.0;
  double tr_s2 = 0.0;
  CumulantEstimates estimates;
  TestReport report;
};

/// Independent route to the full test on explicit induced vectors. The
/// statistic comes from ||w1_bar - w2_bar||^2 - tr(S1/n1 + S2/n2).
BruteForceResult brute_force(const SampleBlock& x, const SampleBlock& y,
                             bool center = true);

TestReport brute_force_report(const SampleBlock& x, const SampleBlock& y,
                              bool center = true);

/// Cov(y (x) y) for y = S z with S = sigma^{1/2} and z i.i.d. standardized
/// innovations of the given model:
///   (S (x) S) [(I + K) + (kappa - 3) D] (S (x) S)
/// with K the commutation matrix, D the diagonal selector of the e_a (x) e_a
/// coordinates and kappa the innovation kurtosis.
Matrix induced_covariance(const Matrix& sigma, Model model);

/// Monte Carlo estimate of the same covariance.
Matrix induced_covariance_mc(const Matrix& sigma, Model model,
                             std::size_t draws, std::uint64_t seed);

struct MixtureSpec {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<double> lambda_n;
  int n1 = 0;
  int n2 = 0;
};

/// Eigenvalues of O1, O2 and O1/n1 + O2/n2 from the induced covariances of the
/// two populations. Sorted descending; tiny negatives clipped to zero.
MixtureSpec mixture_spec_from_cov(const Matrix& sigma1, const Matrix& sigma2,
                                  int n1, int n2, Model model = Model::Normal);

MixtureSpec mixture_spec_from_omega(const Matrix& omega1, const Matrix& omega2,
                                    int n1, int n2);

/// Exact variance and third cumulant of the mixture from eigenvalue sums.
struct MixtureCumulants {
  double k2 = 0.0;
  double k3 = 0.0;
};

MixtureCumulants mixture_cumulants(const MixtureSpec& spec);

/// i.i.d. draws of
///   sum_r ln_r A_r - { sum_r l1_r B1_r / (n1 (n1 - 1)) + sum_r l2_r B2_r / (n2 (n2 - 1)) }
/// with A_r ~ chi2_1 and B_ir ~ chi2_{n_i - 1}. Draws are grouped in fixed
/// blocks with one stream each, so the output depends on (seed, reps) only.
std::vector<double> sample_mixture(const MixtureSpec& spec, std::size_t reps,
                                   std::uint64_t seed, int threads = 0);

}  // namespace hdcov
