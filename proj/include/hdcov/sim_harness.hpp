#pragma once

// Data generators and Monte Carlo experiments for empirical size and power.

#include "hdcov/core_model.hpp"
#include "hdcov/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hdcov {

/// Innovation law. All three are standardized to mean 0, variance 1.
enum class Model { Normal, T5, Chisq1 };
enum class Design { CompoundSymmetry, MovingAverage };
enum class SigmaProfile { Constant4, UniformShift };

const char* to_string(Model m) noexcept;
const char* to_string(Design d) noexcept;

/// E z^4 of the standardized innovation: 3, 9 and 15.
double innovation_kurtosis(Model m) noexcept;

/// sqrt(5/3), the standard deviation of a t_5 variable.
inline const double kT5Scale = 1.2909944487358056;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SimConfig {
  Model model = Model::Normal;
  Design design = Design::CompoundSymmetry;
  int p = 50;
  int n1 = 50;
  int n2 = 80;
  double rho1 = 0.25;
  double rho2 = 0.25;
  /// Profile of the group-2 variances. Group 1 always uses 4.
  SigmaProfile sigma_profile = SigmaProfile::Constant4;
  int m1 = 25;
  int m2 = 25;
  Interval theta1{2.0, 3.0};
  Interval theta2{2.0, 3.0};
  int reps = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  bool center = true;
};

/// Throws InvalidParams for out-of-range fields.
void validate(const SimConfig& config);

/// Null (size) configuration for the given design.
SimConfig size_config(Model model, Design design, int p, int n1, int n2,
                      double rho);

/// Alternative (power) configuration. For compound symmetry rho1 / rho2 are the
/// two correlations and the group-2 variances are 3.5 + U[0,1]; for the
/// moving-average design the orders are p/2 and 2p/5 with coefficients from
/// U[2,3] and U[3,4]. The rho arguments are ignored for moving average.
SimConfig power_config(Model model, Design design, int p, int n1, int n2,
                       double rho1, double rho2);

std::vector<double> gen_innovation(Model model, std::size_t count, Engine& rng);

/// diag(s) ((1 - rho) I + rho J) diag(s), s_k = sqrt(sigma2_k).
Matrix compound_symmetry_cov(const Vector& sigma2, double rho);

/// Population covariance of the moving-average rows:
/// Sigma_kl = sum_j theta_j theta_{j+|k-l|}, theta_0 = 1.
Matrix moving_average_cov(const std::vector<double>& theta, int p);

/// Symmetric square root through the eigendecomposition. Throws NotPSD when an
/// eigenvalue is below -1e-10 times the largest one.
Matrix symmetric_sqrt(const Matrix& sigma);

/// The population behind a configuration. Nuisance draws (group-2 variance
/// shifts, moving-average coefficients) depend on (config, seed) only.
class DataGenerator {
 public:
  explicit DataGenerator(const SimConfig& config);

  /// One sample of n_i rows for group 1 (index 0) or group 2 (index 1).
  SampleBlock draw(int group, Engine& rng) const;

  /// Population covariance of group 1 or 2.
  Matrix covariance(int group) const;

  const Vector& sigma2(int group) const { return sigma2_[group]; }
  const std::vector<double>& theta(int group) const { return theta_[group]; }

 private:
  SampleBlock draw_compound_symmetry(int group, Engine& rng) const;
  SampleBlock draw_moving_average(int group, Engine& rng) const;

  SimConfig config_;
  Vector sigma2_[2];
  Matrix sqrt_[2];
  std::vector<double> theta_[2];
};

struct SizePowerResult {
  double rejection_rate = 0.0;
  double se = 0.0;
  /// Mean matched d over replications that used the chi-square reference.
  double mean_d = 0.0;
  int reps = 0;
  /// Replications that threw (excluded from every rate).
  int failures = 0;
  /// Replications that used the normal fallback.
  int fallbacks = 0;
  SimConfig config;
};

/// Thread count <= 0 means hardware concurrency. The result does not depend on
/// it.
SizePowerResult empirical_size_power(const SimConfig& config, int threads = 0);

/// 100 * mean |a_j - alpha| / alpha. Throws EmptyList.
double are(const std::vector<double>& sizes, double alpha);

/// Phi(-z_alpha + n tau (1 - tau) frob_sq_diff / sqrt(2 tr_omega_sq)).
double asymptotic_power(double n, double tau, double tr_omega_sq,
                        double frob_sq_diff, double alpha);

/// floor(n/2) and ceil(n/2).
std::pair<int, int> split_sizes(int n);

/// Random-split protocol: each replication partitions the rows into two
/// near-halves and tests them against each other.
SizePowerResult random_split_size(const SampleBlock& x, int reps, double alpha,
                                  std::uint64_t seed, bool center = true,
                                  int threads = 0);

std::string sim_csv_header();
std::string to_csv_row(const SizePowerResult& result);

/// Thread count <= 0 resolves to the hardware concurrency.
int resolve_threads(int threads);

}  // namespace hdcov

// parallel_for(count, threads, fn): runs fn(i) for i in [0, count).
#include "hdcov/detail/parallel.hpp"
