#include "hdcov/hdcov.h"

#include "hdcov/chi2_matching.hpp"
#include "hdcov/csv_io.hpp"
#include "hdcov/pipeline.hpp"
#include "hdcov/reference_oracle.hpp"
#include "hdcov/sim_harness.hpp"
#include "hdcov/validation.hpp"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>

struct hdcov_sample {
  hdcov::SampleBlock block;
};

struct hdcov_report {
  hdcov::TestReport report;
};

struct hdcov_mixture {
  hdcov::MixtureSpec spec;
};

namespace {

thread_local std::string g_last_error;

hdcov_status to_status(hdcov::ErrorCode code) {
  using hdcov::ErrorCode;
  switch (code) {
    case ErrorCode::DimensionMismatch: return HDCOV_E_DIMENSION_MISMATCH;
    case ErrorCode::TooFewObservations: return HDCOV_E_TOO_FEW_OBSERVATIONS;
    case ErrorCode::NonFiniteEntry: return HDCOV_E_NONFINITE_ENTRY;
    case ErrorCode::NonpositiveVariance: return HDCOV_E_NONPOSITIVE_VARIANCE;
    case ErrorCode::DegenerateSampleSize: return HDCOV_E_DEGENERATE_SAMPLE_SIZE;
    case ErrorCode::InvalidParams: return HDCOV_E_INVALID_PARAMS;
    case ErrorCode::DimensionTooLarge: return HDCOV_E_DIMENSION_TOO_LARGE;
    case ErrorCode::NotPSD: return HDCOV_E_NOT_PSD;
    case ErrorCode::EmptyList: return HDCOV_E_EMPTY_LIST;
    case ErrorCode::Io: return HDCOV_E_IO;
    case ErrorCode::Parse: return HDCOV_E_PARSE;
  }
  return HDCOV_E_INTERNAL;
}

hdcov_status fail(hdcov_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
hdcov_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const hdcov::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HDCOV_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HDCOV_E_INTERNAL, e.what());
  } catch (...) {
    return fail(HDCOV_E_INTERNAL, "unknown error");
  }
}

hdcov_status null_argument(const char* what) {
  return fail(HDCOV_E_NULL_ARGUMENT, std::string("null argument: ") + what);
}

hdcov_status copy_string(const std::string& s, char* buffer, size_t capacity,
                         size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buffer == nullptr) return HDCOV_OK;
  if (capacity < s.size() + 1) {
    return fail(HDCOV_E_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
  return HDCOV_OK;
}

hdcov::SimConfig from_c(const hdcov_sim_config& c) {
  hdcov::SimConfig s;
  s.model = static_cast<hdcov::Model>(c.model);
  s.design = static_cast<hdcov::Design>(c.design);
  s.p = c.p;
  s.n1 = c.n1;
  s.n2 = c.n2;
  s.rho1 = c.rho1;
  s.rho2 = c.rho2;
  s.sigma_profile = static_cast<hdcov::SigmaProfile>(c.sigma_profile);
  s.m1 = c.m1;
  s.m2 = c.m2;
  s.theta1 = {c.theta1_lo, c.theta1_hi};
  s.theta2 = {c.theta2_lo, c.theta2_hi};
  s.reps = c.reps;
  s.alpha = c.alpha;
  s.seed = c.seed;
  s.center = c.center != 0;
  return s;
}

hdcov_sim_config to_c(const hdcov::SimConfig& s) {
  hdcov_sim_config c{};
  c.model = static_cast<hdcov_model>(s.model);
  c.design = static_cast<hdcov_design>(s.design);
  c.p = s.p;
  c.n1 = s.n1;
  c.n2 = s.n2;
  c.rho1 = s.rho1;
  c.rho2 = s.rho2;
  c.sigma_profile = static_cast<hdcov_sigma_profile>(s.sigma_profile);
  c.m1 = s.m1;
  c.m2 = s.m2;
  c.theta1_lo = s.theta1.lo;
  c.theta1_hi = s.theta1.hi;
  c.theta2_lo = s.theta2.lo;
  c.theta2_hi = s.theta2.hi;
  c.reps = s.reps;
  c.alpha = s.alpha;
  c.seed = s.seed;
  c.center = s.center ? 1 : 0;
  return c;
}

hdcov_sim_result to_c(const hdcov::SizePowerResult& r) {
  return hdcov_sim_result{r.rejection_rate, r.se,       r.mean_d,
                          r.reps,           r.failures, r.fallbacks};
}

bool valid_enums(hdcov_model model, hdcov_design design) {
  return model >= HDCOV_MODEL_NORMAL && model <= HDCOV_MODEL_CHISQ1 &&
         design >= HDCOV_DESIGN_COMPOUND_SYMMETRY &&
         design <= HDCOV_DESIGN_MOVING_AVERAGE;
}

}  // namespace

extern "C" {

const char* hdcov_status_name(hdcov_status status) {
  switch (status) {
    case HDCOV_OK: return "Ok";
    case HDCOV_E_DIMENSION_MISMATCH: return "DimensionMismatch";
    case HDCOV_E_TOO_FEW_OBSERVATIONS: return "TooFewObservations";
    case HDCOV_E_NONFINITE_ENTRY: return "NonFiniteEntry";
    case HDCOV_E_NONPOSITIVE_VARIANCE: return "NonpositiveVariance";
    case HDCOV_E_DEGENERATE_SAMPLE_SIZE: return "DegenerateSampleSize";
    case HDCOV_E_INVALID_PARAMS: return "InvalidParams";
    case HDCOV_E_DIMENSION_TOO_LARGE: return "DimensionTooLarge";
    case HDCOV_E_NOT_PSD: return "NotPSD";
    case HDCOV_E_EMPTY_LIST: return "EmptyList";
    case HDCOV_E_IO: return "Io";
    case HDCOV_E_PARSE: return "Parse";
    case HDCOV_E_NULL_ARGUMENT: return "NullArgument";
    case HDCOV_E_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case HDCOV_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* hdcov_last_error(void) { return g_last_error.c_str(); }

const char* hdcov_version(void) { return "0.1.0"; }

hdcov_status hdcov_sample_create(size_t rows, size_t cols,
                                 const double* row_major, hdcov_sample** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if (row_major == nullptr && rows * cols > 0) return null_argument("data");
  return guarded([&] {
    hdcov::Matrix m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            row_major[i * cols + j];
      }
    }
    *out = new hdcov_sample{hdcov::SampleBlock(std::move(m))};
    return HDCOV_OK;
  });
}

hdcov_status hdcov_sample_read_csv(const char* path, hdcov_sample** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    *out = new hdcov_sample{hdcov::read_csv(path)};
    return HDCOV_OK;
  });
}

hdcov_status hdcov_sample_write_csv(const hdcov_sample* sample,
                                    const char* path) {
  if (sample == nullptr) return null_argument("sample");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    hdcov::write_csv(sample->block, std::string(path));
    return HDCOV_OK;
  });
}

size_t hdcov_sample_rows(const hdcov_sample* sample) {
  return sample ? static_cast<size_t>(sample->block.n()) : 0;
}

size_t hdcov_sample_cols(const hdcov_sample* sample) {
  return sample ? static_cast<size_t>(sample->block.p()) : 0;
}

hdcov_status hdcov_sample_copy(const hdcov_sample* sample, double* out,
                               size_t capacity) {
  if (sample == nullptr) return null_argument("sample");
  if (out == nullptr) return null_argument("out");
  const auto& m = sample->block.data();
  const size_t rows = static_cast<size_t>(m.rows());
  const size_t cols = static_cast<size_t>(m.cols());
  if (capacity < rows * cols) {
    return fail(HDCOV_E_BUFFER_TOO_SMALL, "buffer too small");
  }
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      out[i * cols + j] =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return HDCOV_OK;
}

void hdcov_sample_free(hdcov_sample* sample) { delete sample; }

hdcov_status hdcov_test_run(const hdcov_sample* x, const hdcov_sample* y,
                            int center, hdcov_report** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if (x == nullptr || y == nullptr) return null_argument("sample");
  return guarded([&] {
    hdcov::TestOptions options;
    options.center = center != 0;
    *out = new hdcov_report{hdcov::run_test(x->block, y->block, options)};
    return HDCOV_OK;
  });
}

hdcov_status hdcov_oracle_report(const hdcov_sample* x, const hdcov_sample* y,
                                 int center, hdcov_report** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if (x == nullptr || y == nullptr) return null_argument("sample");
  return guarded([&] {
    *out = new hdcov_report{
        hdcov::brute_force_report(x->block, y->block, center != 0)};
    return HDCOV_OK;
  });
}

hdcov_status hdcov_report_get(const hdcov_report* report,
                              hdcov_report_values* out) {
  if (report == nullptr) return null_argument("report");
  if (out == nullptr) return null_argument("out");
  const hdcov::TestReport& r = report->report;
  out->statistic = r.statistic;
  out->normalized_statistic = r.normalized_statistic;
  out->k2_hat = r.k2_hat;
  out->k3_hat = r.k3_hat;
  out->beta0 = r.beta0;
  out->beta1 = r.beta1;
  out->d = r.d;
  out->p_value = r.p_value;
  out->method = r.method == hdcov::Method::ThreeCumulantChi2
                    ? HDCOV_METHOD_THREE_CUMULANT_CHI2
                    : HDCOV_METHOD_NORMAL_FALLBACK;
  out->n1 = static_cast<size_t>(r.n1);
  out->n2 = static_cast<size_t>(r.n2);
  out->p = static_cast<size_t>(r.p);
  out->centered = r.centered ? 1 : 0;
  return HDCOV_OK;
}

hdcov_status hdcov_report_json(const hdcov_report* report, char* buffer,
                               size_t capacity, size_t* needed) {
  if (report == nullptr) return null_argument("report");
  return guarded([&] {
    return copy_string(hdcov::to_json(report->report), buffer, capacity,
                       needed);
  });
}

void hdcov_report_free(hdcov_report* report) { delete report; }

hdcov_status hdcov_p_value(double t, double beta0, double beta1, double d,
                           double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = hdcov::p_value(t, hdcov::ApproxParams{beta0, beta1, d});
    return HDCOV_OK;
  });
}

hdcov_status hdcov_p_value_normalized(double t_tilde, double d, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = hdcov::p_value_normalized(t_tilde, d);
    return HDCOV_OK;
  });
}

hdcov_status hdcov_critical_value(double beta0, double beta1, double d,
                                  double alpha, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = hdcov::critical_value(hdcov::ApproxParams{beta0, beta1, d}, alpha);
    return HDCOV_OK;
  });
}

hdcov_status hdcov_match_params(double k2, double k3, double* beta0,
                                double* beta1, double* d, int* is_fallback) {
  if (!beta0 || !beta1 || !d || !is_fallback) return null_argument("out");
  return guarded([&] {
    const auto params = hdcov::match_params(k2, k3);
    if (params) {
      *beta0 = params->beta0;
      *beta1 = params->beta1;
      *d = params->d;
      *is_fallback = 0;
    } else {
      *beta0 = *beta1 = *d = std::numeric_limits<double>::quiet_NaN();
      *is_fallback = 1;
    }
    return HDCOV_OK;
  });
}

hdcov_status hdcov_sim_size_config(hdcov_model model, hdcov_design design,
                                   int p, int n1, int n2, double rho,
                                   hdcov_sim_config* out) {
  if (out == nullptr) return null_argument("out");
  if (!valid_enums(model, design)) {
    return fail(HDCOV_E_INVALID_PARAMS, "unknown model or design");
  }
  return guarded([&] {
    *out = to_c(hdcov::size_config(static_cast<hdcov::Model>(model),
                                   static_cast<hdcov::Design>(design), p, n1,
                                   n2, rho));
    return HDCOV_OK;
  });
}

hdcov_status hdcov_sim_power_config(hdcov_model model, hdcov_design design,
                                    int p, int n1, int n2, double rho1,
                                    double rho2, hdcov_sim_config* out) {
  if (out == nullptr) return null_argument("out");
  if (!valid_enums(model, design)) {
    return fail(HDCOV_E_INVALID_PARAMS, "unknown model or design");
  }
  return guarded([&] {
    *out = to_c(hdcov::power_config(static_cast<hdcov::Model>(model),
                                    static_cast<hdcov::Design>(design), p, n1,
                                    n2, rho1, rho2));
    return HDCOV_OK;
  });
}

hdcov_status hdcov_simulate(const hdcov_sim_config* config, int threads,
                            hdcov_sim_result* out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  if (!valid_enums(config->model, config->design)) {
    return fail(HDCOV_E_INVALID_PARAMS, "unknown model or design");
  }
  return guarded([&] {
    *out = to_c(hdcov::empirical_size_power(from_c(*config), threads));
    return HDCOV_OK;
  });
}

hdcov_status hdcov_split_size(const hdcov_sample* sample, int reps,
                              double alpha, uint64_t seed, int center,
                              int threads, hdcov_sim_result* out) {
  if (sample == nullptr) return null_argument("sample");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = to_c(hdcov::random_split_size(sample->block, reps, alpha, seed,
                                         center != 0, threads));
    return HDCOV_OK;
  });
}

const char* hdcov_sim_csv_header(void) {
  static const std::string header = hdcov::sim_csv_header();
  return header.c_str();
}

hdcov_status hdcov_sim_csv_row(const hdcov_sim_config* config,
                               const hdcov_sim_result* result, char* buffer,
                               size_t capacity, size_t* needed) {
  if (config == nullptr || result == nullptr) return null_argument("input");
  return guarded([&] {
    hdcov::SizePowerResult r;
    r.rejection_rate = result->rejection_rate;
    r.se = result->se;
    r.mean_d = result->mean_d;
    r.reps = result->reps;
    r.failures = result->failures;
    r.fallbacks = result->fallbacks;
    r.config = from_c(*config);
    return copy_string(hdcov::to_csv_row(r), buffer, capacity, needed);
  });
}

hdcov_status hdcov_are(const double* sizes, size_t count, double alpha,
                       double* out) {
  if (out == nullptr) return null_argument("out");
  if (sizes == nullptr && count > 0) return null_argument("sizes");
  return guarded([&] {
    *out = hdcov::are(std::vector<double>(sizes, sizes + count), alpha);
    return HDCOV_OK;
  });
}

hdcov_status hdcov_asymptotic_power(double n, double tau, double tr_omega_sq,
                                    double frob_sq_diff, double alpha,
                                    double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = hdcov::asymptotic_power(n, tau, tr_omega_sq, frob_sq_diff, alpha);
    return HDCOV_OK;
  });
}

hdcov_status hdcov_mixture_create(size_t p, const double* sigma1,
                                  const double* sigma2, int n1, int n2,
                                  hdcov_model model, hdcov_mixture** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if (sigma1 == nullptr || sigma2 == nullptr) return null_argument("sigma");
  if (model < HDCOV_MODEL_NORMAL || model > HDCOV_MODEL_CHISQ1) {
    return fail(HDCOV_E_INVALID_PARAMS, "unknown model");
  }
  return guarded([&] {
    const auto dim = static_cast<Eigen::Index>(p);
    if (dim > hdcov::kMaxExplicitDim) {
      throw hdcov::Error(hdcov::ErrorCode::DimensionTooLarge,
                         "mixture oracle needs p <= 12");
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>;
    const hdcov::Matrix s1 = Eigen::Map<const RowMajor>(sigma1, dim, dim);
    const hdcov::Matrix s2 = Eigen::Map<const RowMajor>(sigma2, dim, dim);
    *out = new hdcov_mixture{hdcov::mixture_spec_from_cov(
        s1, s2, n1, n2, static_cast<hdcov::Model>(model))};
    return HDCOV_OK;
  });
}

hdcov_status hdcov_mixture_cumulants(const hdcov_mixture* mixture, double* k2,
                                     double* k3) {
  if (mixture == nullptr) return null_argument("mixture");
  if (k2 == nullptr || k3 == nullptr) return null_argument("out");
  const auto c = hdcov::mixture_cumulants(mixture->spec);
  *k2 = c.k2;
  *k3 = c.k3;
  return HDCOV_OK;
}

hdcov_status hdcov_mixture_sample(const hdcov_mixture* mixture, size_t count,
                                  uint64_t seed, int threads, double* out) {
  if (mixture == nullptr) return null_argument("mixture");
  if (out == nullptr && count > 0) return null_argument("out");
  return guarded([&] {
    if (count == 0) {
      throw hdcov::Error(hdcov::ErrorCode::InvalidParams,
                         "draw count must be >= 1");
    }
    const auto draws = hdcov::sample_mixture(mixture->spec, count, seed, threads);
    std::memcpy(out, draws.data(), count * sizeof(double));
    return HDCOV_OK;
  });
}

void hdcov_mixture_free(hdcov_mixture* mixture) { delete mixture; }

void hdcov_validate_defaults(hdcov_validate_options* out) {
  if (out == nullptr) return;
  const hdcov::ValidationOptions d;
  out->max_p = d.max_p;
  out->instances = d.instances;
  out->mixture_draws = d.mixture_draws;
  out->seed = d.seed;
  out->perturb_gram = d.perturb_gram ? 1 : 0;
}

hdcov_status hdcov_validate(const hdcov_validate_options* options,
                            hdcov_check_sink sink, void* user,
                            int* all_passed) {
  if (options == nullptr) return null_argument("options");
  if (all_passed == nullptr) return null_argument("all_passed");
  return guarded([&] {
    hdcov::ValidationOptions opt;
    opt.max_p = options->max_p;
    opt.instances = options->instances;
    opt.mixture_draws = options->mixture_draws;
    opt.seed = options->seed;
    opt.perturb_gram = options->perturb_gram != 0;
    const auto results =
        hdcov::run_validation(opt, [&](const hdcov::CheckResult& r) {
          if (sink) sink(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
        });
    int ok = 1;
    for (const auto& r : results) ok &= r.passed ? 1 : 0;
    *all_passed = ok;
    return HDCOV_OK;
  });
}

}  // extern "C"
