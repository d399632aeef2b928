#include "hdcov/core_model.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <limits>

using namespace hdcov;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no hdcov::Error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(SampleBlock, AcceptsMinimalShape) {
  const SampleBlock b(Matrix::Ones(3, 1));
  EXPECT_EQ(b.n(), 3);
  EXPECT_EQ(b.p(), 1);
}

TEST(SampleBlock, RejectsTooFewRows) {
  EXPECT_EQ(code_of([] { SampleBlock(Matrix::Ones(2, 4)); }),
            ErrorCode::TooFewObservations);
}

TEST(SampleBlock, RejectsNoColumns) {
  EXPECT_EQ(code_of([] { SampleBlock(Matrix(5, 0)); }),
            ErrorCode::DimensionMismatch);
}

TEST(SampleBlock, NonFiniteEntryNamesPosition) {
  Matrix m = Matrix::Ones(4, 3);
  m(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    SampleBlock b(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteEntry);
    EXPECT_NE(std::string(e.what()).find("row 3, column 2"), std::string::npos)
        << e.what();
  }
  m(2, 1) = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { SampleBlock b(m); }), ErrorCode::NonFiniteEntry);
}

TEST(SamplePair, DimensionMismatch) {
  EXPECT_EQ(code_of([] {
              validate_pair(SampleBlock(Matrix::Ones(4, 2)),
                            SampleBlock(Matrix::Ones(4, 3)));
            }),
            ErrorCode::DimensionMismatch);
  EXPECT_NO_THROW(validate_pair(SampleBlock(Matrix::Ones(4, 2)),
                                SampleBlock(Matrix::Ones(6, 2))));
}

TEST(Centering, ColumnMeansVanish) {
  const SampleBlock b = testutil::random_block(9, 4, 11, 3.0);
  const SampleBlock c = center_by_group_mean(b);
  EXPECT_LT(c.data().colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((c.data() - testutil::naive_center(b.data())).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Cumulants, FromTracesByHand) {
  // n1 = 5, n2 = 7.
  const double k2 = k2_from_traces(2.0, 3.0, 4.0, 5.0, 7.0);
  const double want2 = 2.0 * (2.0 / 20.0 + 2.0 * 3.0 / 35.0 + 4.0 / 42.0);
  EXPECT_NEAR(k2, want2, 1e-15);
  const double k3 = k3_from_traces(1.0, 2.0, 3.0, 4.0, 5.0, 7.0);
  const double want3 = 8.0 * (3.0 * 1.0 / (25.0 * 16.0) + 3.0 * 2.0 / (25.0 * 7.0) +
                              3.0 * 3.0 / (5.0 * 49.0) + 5.0 * 4.0 / (49.0 * 36.0));
  EXPECT_NEAR(k3, want3, 1e-15);
}

TEST(TestReport, JsonHasEveryField) {
  TestReport r;
  r.statistic = 1.5;
  r.normalized_statistic = 0.25;
  r.k2_hat = 36.0;
  r.k3_hat = 10.0;
  r.beta0 = -1.0;
  r.beta1 = 2.0;
  r.d = 3.0;
  r.p_value = 0.125;
  r.n1 = 4;
  r.n2 = 5;
  r.p = 2;
  const auto j = nlohmann::json::parse(to_json(r));
  for (const char* key : {"statistic", "normalized_statistic", "k2_hat", "k3_hat",
                          "beta0", "beta1", "d", "p_value", "method", "n1", "n2",
                          "p", "centered"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["method"], "three_cumulant_chi2");
  EXPECT_DOUBLE_EQ(j["p_value"].get<double>(), 0.125);
  EXPECT_EQ(j["n2"].get<int>(), 5);
  EXPECT_TRUE(j["centered"].get<bool>());
}

TEST(TestReport, FallbackJsonUsesNull) {
  TestReport r;
  r.method = Method::NormalFallback;
  r.beta0 = r.beta1 = r.d = std::numeric_limits<double>::quiet_NaN();
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["method"], "normal_fallback");
  EXPECT_TRUE(j["d"].is_null());
}
