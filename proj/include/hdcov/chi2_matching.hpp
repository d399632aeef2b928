#pragma once

// Three-cumulant matched chi-square reference R = beta0 + beta1 * chi2_d.
//
// Matching mean (zero), variance K2 and third cumulant K3 gives
//   beta0 = -2 K2^2 / K3,  beta1 = K3 / (4 K2),  d = 8 K2^3 / K3^2,
// so beta0 + beta1 d = 0 and the skewness of R is sqrt(8 / d).

#include <optional>

namespace hdcov {

struct ApproxParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double d = 0.0;
};

/// Empty when k3 <= 0: the caller falls back to the normal reference.
/// Throws NonpositiveVariance when k2 <= 0.
std::optional<ApproxParams> match_params(double k2, double k3);

/// Upper tail Pr(chi2_d >= x) for real d > 0. Returns 1 for x <= 0.
double chi2_upper_tail(double x, double d);

/// Lower-tail CDF Pr(chi2_d <= x).
double chi2_cdf(double x, double d);

/// Upper-alpha quantile of chi2_d.
double chi2_upper_quantile(double alpha, double d);

/// Pr(chi2_d >= (t - beta0) / beta1).
double p_value(double t, const ApproxParams& params);

/// Pr(chi2_d >= d + sqrt(2d) t_tilde). Same value as p_value() when
/// t_tilde = t / sqrt(K2) and the params come from the same K2, K3.
double p_value_normalized(double t_tilde, double d);

/// beta0 + beta1 * chi2_d(alpha).
double critical_value(const ApproxParams& params, double alpha);

/// 1 - Phi(t_tilde).
double normal_fallback_p(double t_tilde);

double normal_cdf(double x);

/// Upper-alpha quantile z_alpha of N(0, 1).
double normal_upper_quantile(double alpha);

inline constexpr double kDefaultNormalityThreshold = 50.0;

struct NormalityDiagnostic {
  double d = 0.0;
  double skewness = 0.0;
  bool normal_adequate = false;
};

/// Reports d with the matched skewness sqrt(8/d). Informational only; the
/// p-value never depends on it.
NormalityDiagnostic normality_diagnostic(
    double d, double threshold = kDefaultNormalityThreshold);

}  // namespace hdcov
