#include "hdcov/chi2_matching.hpp"

#include "hdcov/core_model.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace hdcov {

namespace {

void require_valid(const ApproxParams& params) {
  if (!(params.beta1 > 0.0) || !(params.d > 0.0) ||
      !std::isfinite(params.beta0) || !std::isfinite(params.beta1) ||
      !std::isfinite(params.d)) {
    throw Error(ErrorCode::InvalidParams,
                "approximation needs beta1 > 0 and d > 0");
  }
}

void require_dof(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw Error(ErrorCode::InvalidParams, "degrees of freedom must be > 0");
  }
}

void require_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "alpha must lie in (0, 1)");
  }
}

}  // namespace

std::optional<ApproxParams> match_params(double k2, double k3) {
  if (!(k2 > 0.0)) {
    throw Error(ErrorCode::NonpositiveVariance,
                "estimated second cumulant is not positive");
  }
  if (!(k3 > 0.0)) return std::nullopt;
  ApproxParams params;
  params.beta0 = -2.0 * k2 * k2 / k3;
  params.beta1 = k3 / (4.0 * k2);
  params.d = 8.0 * k2 * k2 * k2 / (k3 * k3);
  return params;
}

double chi2_upper_tail(double x, double d) {
  require_dof(d);
  if (std::isnan(x)) {
    throw Error(ErrorCode::InvalidParams, "chi-square argument is NaN");
  }
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * d, 0.5 * x);
}

double chi2_cdf(double x, double d) {
  require_dof(d);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * d, 0.5 * x);
}

double chi2_upper_quantile(double alpha, double d) {
  require_dof(d);
  require_level(alpha);
  return 2.0 * boost::math::gamma_q_inv(0.5 * d, alpha);
}

double p_value(double t, const ApproxParams& params) {
  require_valid(params);
  const double arg = (t - params.beta0) / params.beta1;
  if (arg <= 0.0) return 1.0;
  return chi2_upper_tail(arg, params.d);
}

double p_value_normalized(double t_tilde, double d) {
  require_dof(d);
  const double arg = d + std::sqrt(2.0 * d) * t_tilde;
  if (arg <= 0.0) return 1.0;
  return chi2_upper_tail(arg, d);
}

double critical_value(const ApproxParams& params, double alpha) {
  require_valid(params);
  require_level(alpha);
  return params.beta0 + params.beta1 * chi2_upper_quantile(alpha, params.d);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_fallback_p(double t_tilde) {
  return 0.5 * std::erfc(t_tilde / std::sqrt(2.0));
}

double normal_upper_quantile(double alpha) {
  require_level(alpha);
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * alpha);
}

NormalityDiagnostic normality_diagnostic(double d, double threshold) {
  require_dof(d);
  return NormalityDiagnostic{d, std::sqrt(8.0 / d), d >= threshold};
}

}  // namespace hdcov
