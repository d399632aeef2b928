#pragma once

// Shared domain types for the two-sample covariance equality test.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  DimensionMismatch,
  TooFewObservations,
  NonFiniteEntry,
  NonpositiveVariance,
  DegenerateSampleSize,
  InvalidParams,
  DimensionTooLarge,
  NotPSD,
  EmptyList,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C layer can map it to a stable status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr Eigen::Index kMinObservations = 3;

/// An n x p block of finite observations, rows are subjects.
///
/// Construction checks finiteness and n >= 3; a constructed block is never
/// mutated afterwards.
class SampleBlock {
 public:
  explicit SampleBlock(Matrix data);

  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }

 private:
  Matrix data_;
};

struct SamplePair {
  SampleBlock x;
  SampleBlock y;
};

/// Checks that both blocks share p. The per-block checks already ran when the
/// blocks were built.
SamplePair validate_pair(SampleBlock x, SampleBlock y);

/// Subtracts the column means.
SampleBlock center_by_group_mean(const SampleBlock& x);

struct CumulantEstimates {
  double tr_o1sq = 0.0;
  double tr_o2sq = 0.0;
  double tr_o1o2 = 0.0;
  double tr_o1cu = 0.0;
  double tr_o2cu = 0.0;
  double tr_o1sq_o2 = 0.0;
  double tr_o1_o2sq = 0.0;
  double k2_hat = 0.0;
  double k3_hat = 0.0;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
};

/// Second cumulant of the normal-reference law from the three second-order
/// traces.
double k2_from_traces(double tr_o1sq, double tr_o1o2, double tr_o2sq,
                      double n1, double n2) noexcept;

/// Third cumulant from the four third-order traces.
double k3_from_traces(double tr_o1cu, double tr_o1sq_o2, double tr_o1_o2sq,
                      double tr_o2cu, double n1, double n2) noexcept;

enum class Method { ThreeCumulantChi2, NormalFallback };

const char* to_string(Method method) noexcept;

struct TestReport {
  double statistic = 0.0;
  double normalized_statistic = 0.0;
  double k2_hat = 0.0;
  double k3_hat = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double d = 0.0;
  double p_value = 1.0;
  Method method = Method::ThreeCumulantChi2;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  Eigen::Index p = 0;
  bool centered = true;
};

/// Flat JSON object whose keys are the TestReport field names.
std::string to_json(const TestReport& report);

}  // namespace hdcov
