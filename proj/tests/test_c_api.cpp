// Exercises the shared library through its C header only.

#include "hdcov/hdcov.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

namespace {

hdcov_sample* make_sample(size_t rows, size_t cols, double offset) {
  std::vector<double> v(rows * cols);
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = std::sin(1.3 * static_cast<double>(i) + offset) + 0.1 * offset;
  }
  hdcov_sample* s = nullptr;
  EXPECT_EQ(hdcov_sample_create(rows, cols, v.data(), &s), HDCOV_OK);
  return s;
}

}  // namespace

TEST(CApi, SampleLifecycle) {
  const double data[6] = {1, 2, 3, 4, 5, 6};
  hdcov_sample* s = nullptr;
  ASSERT_EQ(hdcov_sample_create(3, 2, data, &s), HDCOV_OK);
  EXPECT_EQ(hdcov_sample_rows(s), 3u);
  EXPECT_EQ(hdcov_sample_cols(s), 2u);
  double back[6];
  EXPECT_EQ(hdcov_sample_copy(s, back, 5), HDCOV_E_BUFFER_TOO_SMALL);
  ASSERT_EQ(hdcov_sample_copy(s, back, 6), HDCOV_OK);
  EXPECT_EQ(back[3], 4.0);
  hdcov_sample_free(s);
  hdcov_sample_free(nullptr);
}

TEST(CApi, SampleErrors) {
  const double nan_data[6] = {1, 2, NAN, 4, 5, 6};
  hdcov_sample* s = reinterpret_cast<hdcov_sample*>(0x1);
  EXPECT_EQ(hdcov_sample_create(3, 2, nan_data, &s), HDCOV_E_NONFINITE_ENTRY);
  EXPECT_EQ(s, nullptr);
  EXPECT_NE(std::string(hdcov_last_error()).find("row 2, column 1"), std::string::npos)
      << hdcov_last_error();
  EXPECT_EQ(hdcov_sample_create(2, 2, nan_data, &s), HDCOV_E_TOO_FEW_OBSERVATIONS);
  EXPECT_EQ(hdcov_sample_create(3, 2, nullptr, &s), HDCOV_E_NULL_ARGUMENT);
  EXPECT_EQ(hdcov_sample_read_csv("/no/such.csv", &s), HDCOV_E_IO);
  EXPECT_STREQ(hdcov_status_name(HDCOV_E_IO), "Io");
  EXPECT_STREQ(hdcov_status_name(HDCOV_E_DIMENSION_MISMATCH), "DimensionMismatch");
}

TEST(CApi, TestRunAndReport) {
  hdcov_sample* x = make_sample(8, 3, 0.0);
  hdcov_sample* y = make_sample(10, 3, 0.7);
  hdcov_report* r = nullptr;
  ASSERT_EQ(hdcov_test_run(x, y, 1, &r), HDCOV_OK) << hdcov_last_error();
  hdcov_report_values v{};
  ASSERT_EQ(hdcov_report_get(r, &v), HDCOV_OK);
  EXPECT_EQ(v.n1, 8u);
  EXPECT_EQ(v.n2, 10u);
  EXPECT_EQ(v.p, 3u);
  EXPECT_EQ(v.centered, 1);
  EXPECT_GE(v.p_value, 0.0);
  EXPECT_LE(v.p_value, 1.0);
  EXPECT_NEAR(v.normalized_statistic, v.statistic / std::sqrt(v.k2_hat), 1e-12);

  hdcov_report* o = nullptr;
  ASSERT_EQ(hdcov_oracle_report(x, y, 1, &o), HDCOV_OK);
  hdcov_report_values ov{};
  hdcov_report_get(o, &ov);
  EXPECT_NEAR(ov.statistic, v.statistic, 1e-9 * std::sqrt(v.k2_hat));
  EXPECT_NEAR(ov.p_value, v.p_value, 1e-9);

  // Buffer protocol.
  size_t needed = 0;
  EXPECT_EQ(hdcov_report_json(r, nullptr, 0, &needed), HDCOV_OK);
  ASSERT_GT(needed, 10u);
  std::string small(needed - 1, '\0');
  EXPECT_EQ(hdcov_report_json(r, small.data(), small.size(), &needed),
            HDCOV_E_BUFFER_TOO_SMALL);
  std::string buf(needed, '\0');
  ASSERT_EQ(hdcov_report_json(r, buf.data(), buf.size(), &needed), HDCOV_OK);
  EXPECT_EQ(buf.front(), '{');
  EXPECT_NE(buf.find("\"method\""), std::string::npos);

  hdcov_report_free(r);
  hdcov_report_free(o);
  hdcov_sample_free(x);
  hdcov_sample_free(y);
}

TEST(CApi, TestRunErrors) {
  hdcov_sample* x = make_sample(8, 3, 0.0);
  hdcov_sample* y = make_sample(8, 2, 0.0);
  hdcov_sample* tiny = make_sample(3, 3, 0.0);
  hdcov_report* r = nullptr;
  EXPECT_EQ(hdcov_test_run(x, y, 1, &r), HDCOV_E_DIMENSION_MISMATCH);
  EXPECT_EQ(hdcov_test_run(x, tiny, 1, &r), HDCOV_E_DEGENERATE_SAMPLE_SIZE);
  EXPECT_EQ(hdcov_test_run(x, nullptr, 1, &r), HDCOV_E_NULL_ARGUMENT);
  EXPECT_EQ(r, nullptr);
  hdcov_sample_free(x);
  hdcov_sample_free(y);
  hdcov_sample_free(tiny);
}

TEST(CApi, ReferenceDistribution) {
  double b0, b1, d;
  int fallback = -1;
  ASSERT_EQ(hdcov_match_params(2.0, 3.0, &b0, &b1, &d, &fallback), HDCOV_OK);
  EXPECT_EQ(fallback, 0);
  EXPECT_NEAR(d, 8.0 * 8.0 / 9.0, 1e-14);
  double crit = 0, p = 0;
  ASSERT_EQ(hdcov_critical_value(b0, b1, d, 0.05, &crit), HDCOV_OK);
  ASSERT_EQ(hdcov_p_value(crit, b0, b1, d, &p), HDCOV_OK);
  EXPECT_NEAR(p, 0.05, 1e-10);
  ASSERT_EQ(hdcov_match_params(2.0, -1.0, &b0, &b1, &d, &fallback), HDCOV_OK);
  EXPECT_EQ(fallback, 1);
  EXPECT_TRUE(std::isnan(d));
  EXPECT_EQ(hdcov_match_params(0.0, 1.0, &b0, &b1, &d, &fallback),
            HDCOV_E_NONPOSITIVE_VARIANCE);
  EXPECT_EQ(hdcov_p_value_normalized(1.0, -1.0, &p), HDCOV_E_INVALID_PARAMS);
  ASSERT_EQ(hdcov_p_value_normalized(11.11, 1.07, &p), HDCOV_OK);
  EXPECT_NEAR(p, 3.65e-5, 0.05e-5);
}

TEST(CApi, SimulationAndCsv) {
  hdcov_sim_config c{};
  ASSERT_EQ(hdcov_sim_size_config(HDCOV_MODEL_NORMAL, HDCOV_DESIGN_COMPOUND_SYMMETRY,
                                  6, 10, 12, 0.3, &c),
            HDCOV_OK);
  c.reps = 50;
  hdcov_sim_result a{}, b{};
  ASSERT_EQ(hdcov_simulate(&c, 1, &a), HDCOV_OK);
  ASSERT_EQ(hdcov_simulate(&c, 3, &b), HDCOV_OK);
  EXPECT_EQ(a.rejection_rate, b.rejection_rate);
  EXPECT_EQ(a.mean_d, b.mean_d);
  size_t needed = 0;
  ASSERT_EQ(hdcov_sim_csv_row(&c, &a, nullptr, 0, &needed), HDCOV_OK);
  std::string row(needed, '\0');
  ASSERT_EQ(hdcov_sim_csv_row(&c, &a, row.data(), row.size(), &needed), HDCOV_OK);
  EXPECT_EQ(row.rfind("normal,compound_symmetry,6,10,12,", 0), 0u);
  EXPECT_EQ(std::string(hdcov_sim_csv_header()).substr(0, 6), "model,");

  c.reps = 0;
  EXPECT_EQ(hdcov_simulate(&c, 1, &a), HDCOV_E_INVALID_PARAMS);
  c.model = static_cast<hdcov_model>(7);
  c.reps = 5;
  EXPECT_EQ(hdcov_simulate(&c, 1, &a), HDCOV_E_INVALID_PARAMS);
}

TEST(CApi, Summaries) {
  const double sizes[3] = {0.04, 0.05, 0.06};
  double out = 0;
  ASSERT_EQ(hdcov_are(sizes, 3, 0.05, &out), HDCOV_OK);
  EXPECT_NEAR(out, 40.0 / 3.0, 1e-12);
  EXPECT_EQ(hdcov_are(sizes, 0, 0.05, &out), HDCOV_E_EMPTY_LIST);
  ASSERT_EQ(hdcov_asymptotic_power(100, 0.5, 3.0, 0.0, 0.05, &out), HDCOV_OK);
  EXPECT_NEAR(out, 0.05, 1e-12);
}

TEST(CApi, Mixture) {
  const double eye[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  hdcov_mixture* m = nullptr;
  ASSERT_EQ(hdcov_mixture_create(3, eye, eye, 10, 10, HDCOV_MODEL_NORMAL, &m), HDCOV_OK);
  double k2 = 0, k3 = 0;
  ASSERT_EQ(hdcov_mixture_cumulants(m, &k2, &k3), HDCOV_OK);
  // Omega = I + K has eigenvalues 2 (x6) and 0 (x3).
  const double ln = 2.0 / 10 + 2.0 / 10;
  EXPECT_NEAR(k2, 2 * (6 * ln * ln + 2 * 6 * 4.0 / (100 * 9)), 1e-12);
  std::vector<double> a(1000), b(1000);
  ASSERT_EQ(hdcov_mixture_sample(m, a.size(), 3, 1, a.data()), HDCOV_OK);
  ASSERT_EQ(hdcov_mixture_sample(m, b.size(), 3, 2, b.data()), HDCOV_OK);
  EXPECT_EQ(a, b);
  hdcov_mixture_free(m);
  std::vector<double> big(13 * 13, 0.0);
  EXPECT_EQ(hdcov_mixture_create(13, big.data(), big.data(), 5, 5, HDCOV_MODEL_NORMAL, &m),
            HDCOV_E_DIMENSION_TOO_LARGE);
}

TEST(CApi, Validate) {
  hdcov_validate_options o{};
  hdcov_validate_defaults(&o);
  EXPECT_EQ(o.max_p, 4);
  o.instances = 10;
  o.mixture_draws = 50000;
  int count = 0;
  auto sink = [](const char*, int, const char*, void* user) { ++*static_cast<int*>(user); };
  int all = 0;
  ASSERT_EQ(hdcov_validate(&o, sink, &count, &all), HDCOV_OK);
  EXPECT_EQ(all, 1);
  EXPECT_EQ(count, 5);
  o.perturb_gram = 1;
  ASSERT_EQ(hdcov_validate(&o, nullptr, nullptr, &all), HDCOV_OK);
  EXPECT_EQ(all, 0);
  o.max_p = 13;
  EXPECT_EQ(hdcov_validate(&o, nullptr, nullptr, &all), HDCOV_E_DIMENSION_TOO_LARGE);
}
