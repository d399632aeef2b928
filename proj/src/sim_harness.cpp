#include "hdcov/sim_harness.hpp"

#include "hdcov/chi2_matching.hpp"
#include "hdcov/pipeline.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

namespace hdcov {

const char* to_string(Model m) noexcept {
  switch (m) {
    case Model::Normal: return "normal";
    case Model::T5: return "t5";
    case Model::Chisq1: return "chisq1";
  }
  return "unknown";
}

const char* to_string(Design d) noexcept {
  return d == Design::CompoundSymmetry ? "compound_symmetry" : "moving_average";
}

double innovation_kurtosis(Model m) noexcept {
  switch (m) {
    case Model::Normal: return 3.0;
    case Model::T5: return 9.0;       // 3 + 6 / (5 - 4)
    case Model::Chisq1: return 15.0;  // 3 + 12 / 1
  }
  return 3.0;
}

int resolve_threads(int threads) {
  if (const char* env = std::getenv("HDCOV_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void validate(const SimConfig& c) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidParams, msg);
  };
  if (c.reps < 1) fail("reps must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (c.p < 1) fail("p must be at least 1");
  if (c.n1 < 4 || c.n2 < 4) fail("each group needs at least 4 observations");
  if (c.design == Design::CompoundSymmetry) {
    if (!(c.rho1 >= 0.0 && c.rho1 < 1.0) || !(c.rho2 >= 0.0 && c.rho2 < 1.0)) {
      fail("rho must lie in [0, 1)");
    }
  } else {
    if (c.m1 < 0 || c.m2 < 0) fail("moving-average orders must be >= 0");
    if (c.theta1.lo > c.theta1.hi || c.theta2.lo > c.theta2.hi) {
      fail("theta ranges must satisfy lo <= hi");
    }
  }
}

SimConfig size_config(Model model, Design design, int p, int n1, int n2,
                      double rho) {
  SimConfig c;
  c.model = model;
  c.design = design;
  c.p = p;
  c.n1 = n1;
  c.n2 = n2;
  c.sigma_profile = SigmaProfile::Constant4;
  if (design == Design::CompoundSymmetry) {
    c.rho1 = rho;
    c.rho2 = rho;
    c.m1 = c.m2 = 0;
  } else {
    c.rho1 = c.rho2 = 0.0;
    c.m1 = c.m2 = p / 2;
    c.theta1 = c.theta2 = Interval{2.0, 3.0};
  }
  return c;
}

SimConfig power_config(Model model, Design design, int p, int n1, int n2,
                       double rho1, double rho2) {
  SimConfig c = size_config(model, design, p, n1, n2, rho1);
  if (design == Design::CompoundSymmetry) {
    c.rho1 = rho1;
    c.rho2 = rho2;
    c.sigma_profile = SigmaProfile::UniformShift;
  } else {
    c.m1 = p / 2;
    c.m2 = (2 * p) / 5;
    c.theta1 = Interval{2.0, 3.0};
    c.theta2 = Interval{3.0, 4.0};
  }
  return c;
}

std::vector<double> gen_innovation(Model model, std::size_t count,
                                   Engine& rng) {
  std::vector<double> out(count);
  switch (model) {
    case Model::Normal: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (auto& v : out) v = dist(rng);
      break;
    }
    case Model::T5: {
      std::student_t_distribution<double> dist(5.0);
      for (auto& v : out) v = dist(rng) / kT5Scale;
      break;
    }
    case Model::Chisq1: {
      std::chi_squared_distribution<double> dist(1.0);
      const double s = std::sqrt(2.0);
      for (auto& v : out) v = (dist(rng) - 1.0) / s;
      break;
    }
  }
  return out;
}

Matrix compound_symmetry_cov(const Vector& sigma2, double rho) {
  const Eigen::Index p = sigma2.size();
  const Vector s = sigma2.cwiseSqrt();
  Matrix sigma(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      sigma(i, j) = s(i) * s(j) * (i == j ? 1.0 : rho);
    }
  }
  return sigma;
}

Matrix moving_average_cov(const std::vector<double>& theta, int p) {
  std::vector<double> coef(theta.size() + 1);
  coef[0] = 1.0;
  std::copy(theta.begin(), theta.end(), coef.begin() + 1);
  const int m = static_cast<int>(theta.size());
  Matrix sigma = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    for (int l = 0; l < p; ++l) {
      const int lag = std::abs(k - l);
      double acc = 0.0;
      for (int j = 0; j + lag <= m; ++j) acc += coef[j] * coef[j + lag];
      sigma(k, l) = acc;
    }
  }
  return sigma;
}

Matrix symmetric_sqrt(const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPSD, "eigendecomposition failed");
  }
  Vector values = eig.eigenvalues();
  const double top = std::max(values.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -1e-10 * top) {
      throw Error(ErrorCode::NotPSD, "covariance matrix is not PSD");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return eig.eigenvectors() * values.asDiagonal() *
         eig.eigenvectors().transpose();
}

DataGenerator::DataGenerator(const SimConfig& config) : config_(config) {
  validate(config_);
  Engine nuisance = make_stream(config_.seed, 0, StreamPurpose::Nuisance);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int p = config_.p;

  if (config_.design == Design::CompoundSymmetry) {
    sigma2_[0] = Vector::Constant(p, 4.0);
    if (config_.sigma_profile == SigmaProfile::UniformShift) {
      sigma2_[1].resize(p);
      for (int k = 0; k < p; ++k) sigma2_[1](k) = 3.5 + unit(nuisance);
    } else {
      sigma2_[1] = Vector::Constant(p, 4.0);
    }
    sqrt_[0] = symmetric_sqrt(compound_symmetry_cov(sigma2_[0], config_.rho1));
    sqrt_[1] = symmetric_sqrt(compound_symmetry_cov(sigma2_[1], config_.rho2));
  } else {
    auto draw_theta = [&](int m, Interval range) {
      std::vector<double> theta(static_cast<std::size_t>(m));
      for (auto& t : theta) t = range.lo + (range.hi - range.lo) * unit(nuisance);
      return theta;
    };
    theta_[0] = draw_theta(config_.m1, config_.theta1);
    const bool shared = config_.m1 == config_.m2 &&
                        config_.theta1.lo == config_.theta2.lo &&
                        config_.theta1.hi == config_.theta2.hi;
    theta_[1] = shared ? theta_[0] : draw_theta(config_.m2, config_.theta2);
  }
}

Matrix DataGenerator::covariance(int group) const {
  if (config_.design == Design::CompoundSymmetry) {
    return compound_symmetry_cov(sigma2_[group],
                                 group == 0 ? config_.rho1 : config_.rho2);
  }
  return moving_average_cov(theta_[group], config_.p);
}

SampleBlock DataGenerator::draw(int group, Engine& rng) const {
  return config_.design == Design::CompoundSymmetry
             ? draw_compound_symmetry(group, rng)
             : draw_moving_average(group, rng);
}

SampleBlock DataGenerator::draw_compound_symmetry(int group,
                                                  Engine& rng) const {
  const int n = group == 0 ? config_.n1 : config_.n2;
  const int p = config_.p;
  const std::vector<double> z =
      gen_innovation(config_.model, static_cast<std::size_t>(n) * p, rng);
  // Row j of Z holds the innovations of observation j.
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      zm(z.data(), n, p);
  // y_j = S z_j with S symmetric, so Y = Z S.
  return SampleBlock(zm * sqrt_[group]);
}

SampleBlock DataGenerator::draw_moving_average(int group, Engine& rng) const {
  const int n = group == 0 ? config_.n1 : config_.n2;
  const int p = config_.p;
  const std::vector<double>& theta = theta_[group];
  const int m = static_cast<int>(theta.size());
  Matrix y(n, p);
  for (int j = 0; j < n; ++j) {
    const std::vector<double> z =
        gen_innovation(config_.model, static_cast<std::size_t>(p + m), rng);
    for (int k = 0; k < p; ++k) {
      double acc = z[k];
      for (int l = 0; l < m; ++l) acc += theta[l] * z[k + l + 1];
      y(j, k) = acc;
    }
  }
  return SampleBlock(std::move(y));
}

namespace {

struct RepOutcome {
  bool failed = false;
  bool rejected = false;
  bool fallback = false;
  double d = 0.0;
};

RepOutcome classify(const TestReport& r, double alpha) {
  RepOutcome o;
  o.rejected = r.p_value <= alpha;
  o.fallback = r.method == Method::NormalFallback;
  o.d = o.fallback ? 0.0 : r.d;
  return o;
}

SizePowerResult aggregate(const std::vector<RepOutcome>& outcomes) {
  SizePowerResult res;
  int ok = 0;
  int rejections = 0;
  int with_d = 0;
  double d_sum = 0.0;
  // Sequential in replication order so the result is schedule independent.
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++res.failures;
      continue;
    }
    ++ok;
    if (o.rejected) ++rejections;
    if (o.fallback) {
      ++res.fallbacks;
    } else {
      ++with_d;
      d_sum += o.d;
    }
  }
  res.reps = static_cast<int>(outcomes.size());
  if (ok > 0) {
    const double r = static_cast<double>(rejections) / ok;
    res.rejection_rate = r;
    res.se = std::sqrt(r * (1.0 - r) / ok);
  }
  res.mean_d = with_d > 0 ? d_sum / with_d : 0.0;
  return res;
}

}  // namespace

SizePowerResult empirical_size_power(const SimConfig& config, int threads) {
  const DataGenerator gen(config);
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));
  TestOptions options;
  options.center = config.center;
  parallel_for(config.reps, threads, [&](int rep) {
    Engine rng = make_stream(config.seed, static_cast<std::uint64_t>(rep));
    try {
      const SampleBlock x = gen.draw(0, rng);
      const SampleBlock y = gen.draw(1, rng);
      outcomes[rep] = classify(run_test(x, y, options), config.alpha);
    } catch (const Error&) {
      outcomes[rep].failed = true;
    }
  });
  SizePowerResult res = aggregate(outcomes);
  res.config = config;
  return res;
}

double are(const std::vector<double>& sizes, double alpha) {
  if (sizes.empty()) {
    throw Error(ErrorCode::EmptyList, "ARE needs at least one empirical size");
  }
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "alpha must be positive");
  }
  double acc = 0.0;
  for (double a : sizes) acc += std::abs(a - alpha) / alpha;
  return 100.0 * acc / static_cast<double>(sizes.size());
}

double asymptotic_power(double n, double tau, double tr_omega_sq,
                        double frob_sq_diff, double alpha) {
  if (!(tr_omega_sq > 0.0) || !(tau > 0.0 && tau < 1.0) || !(n > 0.0)) {
    throw Error(ErrorCode::InvalidParams,
                "asymptotic power needs n > 0, 0 < tau < 1, tr(O^2) > 0");
  }
  const double z = normal_upper_quantile(alpha);
  const double shift =
      n * tau * (1.0 - tau) * frob_sq_diff / std::sqrt(2.0 * tr_omega_sq);
  return normal_cdf(-z + shift);
}

std::pair<int, int> split_sizes(int n) { return {n / 2, n - n / 2}; }

SizePowerResult random_split_size(const SampleBlock& x, int reps, double alpha,
                                  std::uint64_t seed, bool center,
                                  int threads) {
  const int n = static_cast<int>(x.n());
  if (n < 8) {
    throw Error(ErrorCode::TooFewObservations,
                "random splitting needs at least 8 rows");
  }
  if (reps < 1) throw Error(ErrorCode::InvalidParams, "reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "alpha must lie in (0, 1)");
  }
  const auto [size1, size2] = split_sizes(n);
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  TestOptions options;
  options.center = center;
  parallel_for(reps, threads, [&](int rep) {
    Engine rng =
        make_stream(seed, static_cast<std::uint64_t>(rep), StreamPurpose::Split);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix a(size1, x.p());
    Matrix b(size2, x.p());
    for (int i = 0; i < size1; ++i) a.row(i) = x.data().row(order[i]);
    for (int i = 0; i < size2; ++i) b.row(i) = x.data().row(order[size1 + i]);
    try {
      outcomes[rep] = classify(
          run_test(SampleBlock(std::move(a)), SampleBlock(std::move(b)), options),
          alpha);
    } catch (const Error&) {
      outcomes[rep].failed = true;
    }
  });
  SizePowerResult res = aggregate(outcomes);
  res.config.p = static_cast<int>(x.p());
  res.config.n1 = size1;
  res.config.n2 = size2;
  res.config.reps = reps;
  res.config.alpha = alpha;
  res.config.seed = seed;
  res.config.center = center;
  return res;
}

std::string sim_csv_header() {
  return "model,design,p,n1,n2,rho1,rho2,reps,alpha,rejection_rate,se,mean_d,"
         "failures,seed";
}

std::string to_csv_row(const SizePowerResult& r) {
  const SimConfig& c = r.config;
  std::ostringstream os;
  os.precision(17);
  os << to_string(c.model) << ',' << to_string(c.design) << ',' << c.p << ','
     << c.n1 << ',' << c.n2 << ',';
  if (c.design == Design::CompoundSymmetry) {
    os << c.rho1 << ',' << c.rho2 << ',';
  } else {
    os << ",,";
  }
  os << r.reps << ',' << c.alpha << ',' << r.rejection_rate << ',' << r.se
     << ',' << r.mean_d << ',' << r.failures << ',' << c.seed;
  return os.str();
}

}  // namespace hdcov
