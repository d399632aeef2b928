#include "hdcov/pipeline.hpp"

#include "hdcov/chi2_matching.hpp"
#include "hdcov/test_statistic.hpp"
#include "hdcov/trace_estimators.hpp"

#include <cmath>
#include <limits>

namespace hdcov {

TestReport report_from_gram(const GramBlocks& g, Eigen::Index p,
                            bool centered) {
  TestReport r;
  r.n1 = g.n1();
  r.n2 = g.n2();
  r.p = p;
  r.centered = centered;
  r.statistic = compute_t(g, r.n1, r.n2);

  const CumulantEstimates est = cumulants_hat(double_center(g));
  r.k2_hat = est.k2_hat;
  r.k3_hat = est.k3_hat;
  r.normalized_statistic = normalize_t(r.statistic, est.k2_hat);

  if (const auto params = match_params(est.k2_hat, est.k3_hat)) {
    r.method = Method::ThreeCumulantChi2;
    r.beta0 = params->beta0;
    r.beta1 = params->beta1;
    r.d = params->d;
    r.p_value = p_value(r.statistic, *params);
  } else {
    r.method = Method::NormalFallback;
    // No matched reference exists; serialized as null.
    r.beta0 = std::numeric_limits<double>::quiet_NaN();
    r.beta1 = r.beta0;
    r.d = r.beta0;
    r.p_value = normal_fallback_p(r.normalized_statistic);
  }
  return r;
}

TestReport run_test(const SampleBlock& x, const SampleBlock& y,
                    const TestOptions& options) {
  const SamplePair pair = validate_pair(x, y);
  if (options.center) {
    const SampleBlock cx = center_by_group_mean(pair.x);
    const SampleBlock cy = center_by_group_mean(pair.y);
    return report_from_gram(induced_gram(cx, cy), x.p(), true);
  }
  return report_from_gram(induced_gram(pair.x, pair.y), x.p(), false);
}

}  // namespace hdcov
