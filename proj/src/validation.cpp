#include "hdcov/validation.hpp"

#include "hdcov/chi2_matching.hpp"
#include "hdcov/gram_kernel.hpp"
#include "hdcov/pipeline.hpp"
#include "hdcov/reference_oracle.hpp"

#include <cmath>
#include <sstream>

namespace hdcov {

namespace {

bool close(double a, double b, double tol, double scale) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  const double ref = std::max({std::abs(a), std::abs(b), scale});
  return std::abs(a - b) <= tol * ref;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_oracle_equivalence(const ValidationOptions& opt) {
  CheckResult res{"oracle_equivalence", true, ""};
  for (int i = 0; i < opt.instances; ++i) {
    const SeededInstance inst = seeded_instance(opt.seed, i, opt.max_p);
    const TestReport oracle = brute_force_report(inst.x, inst.y, inst.center);
    const SampleBlock x = inst.center ? center_by_group_mean(inst.x) : inst.x;
    const SampleBlock y = inst.center ? center_by_group_mean(inst.y) : inst.y;
    GramBlocks g = induced_gram(x, y);
    if (opt.perturb_gram) g.g12(0, 0) *= 1.0 + 1e-6;
    const TestReport main = report_from_gram(g, x.p(), inst.center);
    if (const auto field = compare_reports(main, oracle, 1e-9)) {
      res.passed = false;
      res.detail = "instance " + std::to_string(i) + " differs in " + *field;
      return res;
    }
  }
  res.detail = std::to_string(opt.instances) + " instances agree to 1e-9";
  return res;
}

CheckResult check_gram_explicit(const ValidationOptions& opt) {
  CheckResult res{"gram_explicit_equality", true, ""};
  for (int i = 0; i < opt.instances; ++i) {
    const SeededInstance inst = seeded_instance(opt.seed + 1, i, opt.max_p);
    GramBlocks g = induced_gram(inst.x, inst.y);
    if (opt.perturb_gram) g.g12(0, 0) *= 1.0 + 1e-6;
    const Matrix w1 = explicit_induced(inst.x);
    const Matrix w2 = explicit_induced(inst.y);
    const Matrix e11 = w1 * w1.transpose();
    const Matrix e12 = w1 * w2.transpose();
    const Matrix e22 = w2 * w2.transpose();
    const double err = std::max({(g.g11 - e11).cwiseAbs().maxCoeff() /
                                     e11.cwiseAbs().maxCoeff(),
                                 (g.g12 - e12).cwiseAbs().maxCoeff() /
                                     e12.cwiseAbs().maxCoeff(),
                                 (g.g22 - e22).cwiseAbs().maxCoeff() /
                                     e22.cwiseAbs().maxCoeff()});
    if (err > 1e-10) {
      res.passed = false;
      res.detail = "instance " + std::to_string(i) +
                   " relative Gram error " + fmt(err);
      return res;
    }
  }
  res.detail = "Gram blocks equal explicit Kronecker inner products";
  return res;
}

CheckResult check_mixture_moments(const ValidationOptions& opt) {
  CheckResult res{"mixture_moments", true, ""};
  const int p = std::min(opt.max_p, 3);
  const Matrix sigma = compound_symmetry_cov(Vector::Ones(p), 0.3);
  const MixtureSpec spec = mixture_spec_from_cov(sigma, sigma, 10, 15);
  const MixtureCumulants exact = mixture_cumulants(spec);
  const std::vector<double> draws =
      sample_mixture(spec, opt.mixture_draws, opt.seed);
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, m6 = 0.0;
  for (double v : draws) {
    const double c = v - mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
    m6 += c2 * c2 * c2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m6 /= n;
  const double se_mean = std::sqrt(m2 / n);
  const double se_var = std::sqrt((m4 - m2 * m2) / n);
  const double se_m3 =
      std::sqrt(std::max(0.0, m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2 * m2 * m2) /
                n);
  std::ostringstream detail;
  detail << "mean " << fmt(mean) << " (se " << fmt(se_mean) << "), var "
         << fmt(m2) << " vs " << fmt(exact.k2) << ", third " << fmt(m3)
         << " vs " << fmt(exact.k3);
  res.detail = detail.str();
  res.passed = std::abs(mean) <= 5.0 * se_mean &&
               std::abs(m2 - exact.k2) <= 5.0 * se_var &&
               std::abs(m3 - exact.k3) <= 5.0 * se_m3;
  return res;
}

CheckResult check_chi2_closed_forms() {
  CheckResult res{"chi2_closed_forms", true, ""};
  double worst = 0.0;
  for (double x : {0.05, 0.5, 1.0, 2.5, 4.0, 10.0, 30.0}) {
    // d = 2: exp(-x/2); d = 4: (1 + x/2) exp(-x/2); d = 1: erfc(sqrt(x/2)).
    worst = std::max(worst, std::abs(chi2_upper_tail(x, 2.0) - std::exp(-x / 2)));
    worst = std::max(worst, std::abs(chi2_upper_tail(x, 4.0) -
                                     (1 + x / 2) * std::exp(-x / 2)));
    worst = std::max(worst, std::abs(chi2_upper_tail(x, 1.0) -
                                     std::erfc(std::sqrt(x / 2))));
  }
  res.passed = worst <= 1e-12;
  res.detail = "max abs error " + fmt(worst);
  return res;
}

CheckResult check_round_trip(const ValidationOptions& opt) {
  CheckResult res{"critical_value_round_trip", true, ""};
  Engine rng = make_stream(opt.seed, 7, StreamPurpose::Oracle);
  std::uniform_real_distribution<double> k2d(0.1, 10.0);
  std::uniform_real_distribution<double> log_d(std::log(0.5), std::log(500.0));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    // Draw d directly; k3 = sqrt(8 k2^3 / d) reproduces it.
    const double k2 = k2d(rng);
    const double d = std::exp(log_d(rng));
    const auto params = match_params(k2, std::sqrt(8.0 * k2 * k2 * k2 / d));
    for (double alpha : {0.01, 0.05, 0.10}) {
      const double back = p_value(critical_value(*params, alpha), *params);
      worst = std::max(worst, std::abs(back - alpha));
    }
  }
  res.passed = worst <= 1e-8;
  res.detail = "max |p(crit(alpha)) - alpha| = " + fmt(worst);
  return res;
}

}  // namespace

std::optional<std::string> compare_reports(const TestReport& a,
                                           const TestReport& b, double tol) {
  if (a.method != b.method) return "method";
  if (a.n1 != b.n1) return "n1";
  if (a.n2 != b.n2) return "n2";
  if (a.p != b.p) return "p";
  if (a.centered != b.centered) return "centered";
  const double t_scale = std::sqrt(std::max(a.k2_hat, 0.0));
  if (!close(a.statistic, b.statistic, tol, t_scale)) return "statistic";
  if (!close(a.normalized_statistic, b.normalized_statistic, tol, 1.0)) {
    return "normalized_statistic";
  }
  if (!close(a.k2_hat, b.k2_hat, tol, 0.0)) return "k2_hat";
  if (!close(a.k3_hat, b.k3_hat, tol, 0.0)) return "k3_hat";
  if (!close(a.beta0, b.beta0, tol, 0.0)) return "beta0";
  if (!close(a.beta1, b.beta1, tol, 0.0)) return "beta1";
  if (!close(a.d, b.d, tol, 0.0)) return "d";
  if (!close(a.p_value, b.p_value, tol, 1e-300)) return "p_value";
  return std::nullopt;
}

SeededInstance seeded_instance(std::uint64_t seed, int index, int max_p) {
  Engine rng = make_stream(seed, static_cast<std::uint64_t>(index),
                           StreamPurpose::Oracle);
  const int p = std::uniform_int_distribution<int>(2, std::max(2, max_p))(rng);
  std::uniform_int_distribution<int> n_dist(4, 12);
  const int n1 = n_dist(rng);
  const int n2 = n_dist(rng);
  const Model model = static_cast<Model>(index % 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto block = [&](int n) {
    Matrix mix = Matrix::Identity(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) mix(i, j) += 0.5 * unit(rng);
    }
    Vector mean(p);
    for (int j = 0; j < p; ++j) mean(j) = unit(rng);
    const std::vector<double> z =
        gen_innovation(model, static_cast<std::size_t>(n) * p, rng);
    Matrix y(n, p);
    for (int i = 0; i < n; ++i) {
      const Vector zi = Eigen::Map<const Vector>(z.data() + i * p, p);
      y.row(i) = (mix * zi + mean).transpose();
    }
    return SampleBlock(std::move(y));
  };
  SampleBlock x = block(n1);
  SampleBlock y = block(n2);
  return SeededInstance{std::move(x), std::move(y), model, index % 4 != 3};
}

std::vector<CheckResult> run_validation(
    const ValidationOptions& options,
    const std::function<void(const CheckResult&)>& sink) {
  if (options.max_p > kMaxExplicitDim) {
    std::ostringstream msg;
    msg << "explicit routes need p <= " << kMaxExplicitDim << ", got "
        << options.max_p;
    throw Error(ErrorCode::DimensionTooLarge, msg.str());
  }
  if (options.max_p < 2 || options.instances < 1) {
    throw Error(ErrorCode::InvalidParams,
                "validation needs max_p >= 2 and at least one instance");
  }
  std::vector<CheckResult> results;
  auto record = [&](CheckResult r) {
    if (sink) sink(r);
    results.push_back(std::move(r));
  };
  record(check_gram_explicit(options));
  record(check_oracle_equivalence(options));
  record(check_chi2_closed_forms());
  record(check_round_trip(options));
  record(check_mixture_moments(options));
  return results;
}

}  // namespace hdcov
