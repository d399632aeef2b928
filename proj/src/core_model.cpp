#include "hdcov/core_model.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace hdcov {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NonpositiveVariance: return "NonpositiveVariance";
    case ErrorCode::DegenerateSampleSize: return "DegenerateSampleSize";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

const char* to_string(Method method) noexcept {
  return method == Method::ThreeCumulantChi2 ? "three_cumulant_chi2"
                                             : "normal_fallback";
}

SampleBlock::SampleBlock(Matrix data) : data_(std::move(data)) {
  if (data_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "sample block has no columns");
  }
  if (data_.rows() < kMinObservations) {
    std::ostringstream msg;
    msg << "sample block has " << data_.rows()
        << " observations, at least " << kMinObservations << " are required";
    throw Error(ErrorCode::TooFewObservations, msg.str());
  }
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    for (Eigen::Index j = 0; j < data_.cols(); ++j) {
      if (!std::isfinite(data_(i, j))) {
        std::ostringstream msg;
        msg << "non-finite entry at row " << i + 1 << ", column " << j + 1;
        throw Error(ErrorCode::NonFiniteEntry, msg.str());
      }
    }
  }
}

SamplePair validate_pair(SampleBlock x, SampleBlock y) {
  if (x.p() != y.p()) {
    std::ostringstream msg;
    msg << "samples have different dimensions: " << x.p() << " vs " << y.p();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  return SamplePair{std::move(x), std::move(y)};
}

SampleBlock center_by_group_mean(const SampleBlock& x) {
  const Eigen::RowVectorXd mean = x.data().colwise().mean();
  Matrix centered = x.data().rowwise() - mean;
  return SampleBlock(std::move(centered));
}

double k2_from_traces(double tr_o1sq, double tr_o1o2, double tr_o2sq,
                      double n1, double n2) noexcept {
  return 2.0 * (tr_o1sq / (n1 * (n1 - 1.0)) + 2.0 * tr_o1o2 / (n1 * n2) +
                tr_o2sq / (n2 * (n2 - 1.0)));
}

double k3_from_traces(double tr_o1cu, double tr_o1sq_o2, double tr_o1_o2sq,
                      double tr_o2cu, double n1, double n2) noexcept {
  const double a = (n1 - 2.0) * tr_o1cu / (n1 * n1 * (n1 - 1.0) * (n1 - 1.0));
  const double b = 3.0 * tr_o1sq_o2 / (n1 * n1 * n2);
  const double c = 3.0 * tr_o1_o2sq / (n1 * n2 * n2);
  const double e = (n2 - 2.0) * tr_o2cu / (n2 * n2 * (n2 - 1.0) * (n2 - 1.0));
  return 8.0 * (a + b + c + e);
}

std::string to_json(const TestReport& report) {
  nlohmann::ordered_json j;
  j["statistic"] = report.statistic;
  j["normalized_statistic"] = report.normalized_statistic;
  j["k2_hat"] = report.k2_hat;
  j["k3_hat"] = report.k3_hat;
  j["beta0"] = report.beta0;
  j["beta1"] = report.beta1;
  j["d"] = report.d;
  j["p_value"] = report.p_value;
  j["method"] = to_string(report.method);
  j["n1"] = report.n1;
  j["n2"] = report.n2;
  j["p"] = report.p;
  j["centered"] = report.centered;
  return j.dump();
}

}  // namespace hdcov
