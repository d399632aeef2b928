#include "hdcov/reference_oracle.hpp"

#include "hdcov/chi2_matching.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace hdcov {

namespace {

void require_explicit_dim(Eigen::Index p) {
  if (p > kMaxExplicitDim) {
    std::ostringstream msg;
    msg << "explicit induced vectors need p <= " << kMaxExplicitDim << ", got "
        << p;
    throw Error(ErrorCode::DimensionTooLarge, msg.str());
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<double> clipped_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPSD, "eigendecomposition failed");
  }
  std::vector<double> values(eig.eigenvalues().data(),
                             eig.eigenvalues().data() + m.rows());
  const double top =
      values.empty() ? 0.0 : std::max(0.0, *std::max_element(values.begin(),
                                                              values.end()));
  for (double& v : values) {
    if (v < 0.0) {
      if (v < -1e-10 * top) {
        throw Error(ErrorCode::NotPSD, "induced covariance is not PSD");
      }
      v = 0.0;
    }
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double power_sum(const std::vector<double>& v, int k) {
  double acc = 0.0;
  for (double x : v) acc += std::pow(x, k);
  return acc;
}

}  // namespace

Matrix explicit_induced(const SampleBlock& x) {
  const Eigen::Index p = x.p();
  require_explicit_dim(p);
  Matrix w(x.n(), p * p);
  for (Eigen::Index j = 0; j < x.n(); ++j) {
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = 0; b < p; ++b) {
        w(j, a * p + b) = x.data()(j, a) * x.data()(j, b);
      }
    }
  }
  return w;
}

ExplicitMoments explicit_moments(const Matrix& w) {
  ExplicitMoments m;
  m.mean = w.colwise().mean().transpose();
  const Matrix centered = w.rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * centered / static_cast<double>(w.rows() - 1);
  return m;
}

BruteForceResult brute_force(const SampleBlock& x_in, const SampleBlock& y_in,
                             bool center) {
  if (x_in.p() != y_in.p()) {
    throw Error(ErrorCode::DimensionMismatch, "samples differ in dimension");
  }
  require_explicit_dim(x_in.p());
  const SampleBlock x = center ? center_by_group_mean(x_in) : x_in;
  const SampleBlock y = center ? center_by_group_mean(y_in) : y_in;

  const double n1 = static_cast<double>(x.n());
  const double n2 = static_cast<double>(y.n());
  if (n1 < 4 || n2 < 4) {
    throw Error(ErrorCode::DegenerateSampleSize,
                "the full test needs at least 4 observations per group");
  }
  const ExplicitMoments m1 = explicit_moments(explicit_induced(x));
  const ExplicitMoments m2 = explicit_moments(explicit_induced(y));
  const Matrix& s1 = m1.cov;
  const Matrix& s2 = m2.cov;

  BruteForceResult out;
  out.tr_s1 = s1.trace();
  out.tr_s2 = s2.trace();
  out.statistic =
      (m1.mean - m2.mean).squaredNorm() - out.tr_s1 / n1 - out.tr_s2 / n2;

  const Matrix s1s1 = s1 * s1;
  const Matrix s2s2 = s2 * s2;
  const double tr_s1sq = s1s1.trace();
  const double tr_s2sq = s2s2.trace();
  const double tr_s1s2 = (s1 * s2).trace();
  const double tr_s1cu = (s1s1 * s1).trace();
  const double tr_s2cu = (s2s2 * s2).trace();
  const double tr_s1sq_s2 = (s1s1 * s2).trace();
  const double tr_s1_s2sq = (s1 * s2s2).trace();

  auto sq_hat = [](double n, double t2, double t1) {
    return (n - 1) * (n - 1) / ((n - 2) * (n + 1)) * (t2 - t1 * t1 / (n - 1));
  };
  auto cu_hat = [](double n, double t3, double t2, double t1) {
    const double num = std::pow(n - 1, 4);
    const double den = (n * n + n - 6) * (n * n - 2 * n - 3);
    return num / den *
           (t3 - 3 * t1 * t2 / (n - 1) + 2 * t1 * t1 * t1 / ((n - 1) * (n - 1)));
  };
  auto cross_hat = [&](double n, double t_sq_cross, double t_own) {
    return (n - 1) / ((n - 2) * (n + 1)) *
           ((n - 1) * t_sq_cross - tr_s1s2 * t_own);
  };

  CumulantEstimates& e = out.estimates;
  e.n1 = x.n();
  e.n2 = y.n();
  e.tr_o1sq = sq_hat(n1, tr_s1sq, out.tr_s1);
  e.tr_o2sq = sq_hat(n2, tr_s2sq, out.tr_s2);
  e.tr_o1o2 = tr_s1s2;
  e.tr_o1cu = cu_hat(n1, tr_s1cu, tr_s1sq, out.tr_s1);
  e.tr_o2cu = cu_hat(n2, tr_s2cu, tr_s2sq, out.tr_s2);
  e.tr_o1sq_o2 = cross_hat(n1, tr_s1sq_s2, out.tr_s1);
  e.tr_o1_o2sq = cross_hat(n2, tr_s1_s2sq, out.tr_s2);
  e.k2_hat = 2 * (e.tr_o1sq / (n1 * (n1 - 1)) + 2 * e.tr_o1o2 / (n1 * n2) +
                  e.tr_o2sq / (n2 * (n2 - 1)));
  e.k3_hat = 8 * ((n1 - 2) * e.tr_o1cu / std::pow(n1 * (n1 - 1), 2) +
                  3 * e.tr_o1sq_o2 / (n1 * n1 * n2) +
                  3 * e.tr_o1_o2sq / (n1 * n2 * n2) +
                  (n2 - 2) * e.tr_o2cu / std::pow(n2 * (n2 - 1), 2));

  TestReport& r = out.report;
  r.statistic = out.statistic;
  r.k2_hat = e.k2_hat;
  r.k3_hat = e.k3_hat;
  r.n1 = x.n();
  r.n2 = y.n();
  r.p = x.p();
  r.centered = center;
  if (!(e.k2_hat > 0.0)) {
    throw Error(ErrorCode::NonpositiveVariance,
                "estimated variance of the statistic is not positive");
  }
  r.normalized_statistic = out.statistic / std::sqrt(e.k2_hat);
  if (e.k3_hat > 0.0) {
    r.method = Method::ThreeCumulantChi2;
    r.d = 8 * std::pow(e.k2_hat, 3) / (e.k3_hat * e.k3_hat);
    r.beta1 = e.k3_hat / (4 * e.k2_hat);
    r.beta0 = -r.beta1 * r.d;
    // Normalized route, independent of the (t - beta0) / beta1 form.
    r.p_value = p_value_normalized(r.normalized_statistic, r.d);
  } else {
    r.method = Method::NormalFallback;
    r.beta0 = r.beta1 = r.d = std::numeric_limits<double>::quiet_NaN();
    r.p_value = normal_fallback_p(r.normalized_statistic);
  }
  return out;
}

TestReport brute_force_report(const SampleBlock& x, const SampleBlock& y,
                              bool center) {
  return brute_force(x, y, center).report;
}

Matrix induced_covariance(const Matrix& sigma, Model model) {
  const Eigen::Index p = sigma.rows();
  require_explicit_dim(p);
  const Matrix s = symmetric_sqrt(sigma);
  const Matrix ss = kron(s, s);
  const Eigen::Index q = p * p;
  Matrix middle = Matrix::Identity(q, q);
  const double excess = innovation_kurtosis(model) - 3.0;
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) {
      middle(a * p + b, b * p + a) += 1.0;
    }
    middle(a * p + a, a * p + a) += excess;
  }
  return ss * middle * ss.transpose();
}

Matrix induced_covariance_mc(const Matrix& sigma, Model model,
                             std::size_t draws, std::uint64_t seed) {
  const Eigen::Index p = sigma.rows();
  require_explicit_dim(p);
  const Matrix s = symmetric_sqrt(sigma);
  const Eigen::Index q = p * p;
  // Shift by the exact mean vec(sigma) before accumulating.
  Vector shift(q);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) shift(a * p + b) = sigma(a, b);
  }
  Engine rng = make_stream(seed, 0, StreamPurpose::Oracle);
  Vector sum = Vector::Zero(q);
  Matrix outer = Matrix::Zero(q, q);
  Vector u(q);
  for (std::size_t k = 0; k < draws; ++k) {
    const std::vector<double> z =
        gen_innovation(model, static_cast<std::size_t>(p), rng);
    const Vector y = s * Eigen::Map<const Vector>(z.data(), p);
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = 0; b < p; ++b) u(a * p + b) = y(a) * y(b);
    }
    u -= shift;
    sum += u;
    outer.selfadjointView<Eigen::Lower>().rankUpdate(u);
  }
  outer = outer.selfadjointView<Eigen::Lower>();
  const double n = static_cast<double>(draws);
  const Vector mean = sum / n;
  return (outer - n * mean * mean.transpose()) / (n - 1.0);
}

MixtureSpec mixture_spec_from_omega(const Matrix& omega1, const Matrix& omega2,
                                    int n1, int n2) {
  if (n1 < 3 || n2 < 3) {
    throw Error(ErrorCode::TooFewObservations,
                "mixture needs at least 3 observations per group");
  }
  if (omega1.rows() != omega2.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "induced covariances differ");
  }
  MixtureSpec spec;
  spec.n1 = n1;
  spec.n2 = n2;
  spec.lambda1 = clipped_eigenvalues(omega1);
  spec.lambda2 = clipped_eigenvalues(omega2);
  spec.lambda_n = clipped_eigenvalues(omega1 / n1 + omega2 / n2);
  return spec;
}

MixtureSpec mixture_spec_from_cov(const Matrix& sigma1, const Matrix& sigma2,
                                  int n1, int n2, Model model) {
  if (sigma1.rows() != sigma2.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "covariances differ in size");
  }
  return mixture_spec_from_omega(induced_covariance(sigma1, model),
                                 induced_covariance(sigma2, model), n1, n2);
}

MixtureCumulants mixture_cumulants(const MixtureSpec& spec) {
  const double n1 = spec.n1;
  const double n2 = spec.n2;
  MixtureCumulants c;
  c.k2 = 2.0 * (power_sum(spec.lambda_n, 2) +
                power_sum(spec.lambda1, 2) / (n1 * n1 * (n1 - 1.0)) +
                power_sum(spec.lambda2, 2) / (n2 * n2 * (n2 - 1.0)));
  c.k3 = 8.0 * (power_sum(spec.lambda_n, 3) -
                power_sum(spec.lambda1, 3) /
                    (n1 * n1 * n1 * (n1 - 1.0) * (n1 - 1.0)) -
                power_sum(spec.lambda2, 3) /
                    (n2 * n2 * n2 * (n2 - 1.0) * (n2 - 1.0)));
  return c;
}

std::vector<double> sample_mixture(const MixtureSpec& spec, std::size_t reps,
                                   std::uint64_t seed, int threads) {
  constexpr std::size_t kBlock = 4096;
  auto nonzero = [](const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) {
      if (x > 0.0) out.push_back(x);
    }
    return out;
  };
  const std::vector<double> ln = nonzero(spec.lambda_n);
  const std::vector<double> l1 = nonzero(spec.lambda1);
  const std::vector<double> l2 = nonzero(spec.lambda2);
  const double w1 = 1.0 / (static_cast<double>(spec.n1) * (spec.n1 - 1));
  const double w2 = 1.0 / (static_cast<double>(spec.n2) * (spec.n2 - 1));

  std::vector<double> out(reps);
  const std::size_t blocks = (reps + kBlock - 1) / kBlock;
  parallel_for(static_cast<int>(blocks), threads, [&](int b) {
    Engine rng = make_stream(seed, static_cast<std::uint64_t>(b),
                             StreamPurpose::Mixture);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi1(spec.n1 - 1.0);
    std::chi_squared_distribution<double> chi2(spec.n2 - 1.0);
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(reps, begin + kBlock);
    for (std::size_t k = begin; k < end; ++k) {
      double pos = 0.0;
      for (double l : ln) {
        const double z = normal(rng);
        pos += l * z * z;
      }
      double neg1 = 0.0;
      for (double l : l1) neg1 += l * chi1(rng);
      double neg2 = 0.0;
      for (double l : l2) neg2 += l * chi2(rng);
      out[k] = pos - (w1 * neg1 + w2 * neg2);
    }
  });
  return out;
}

}  // namespace hdcov
