/*
 * hdcov: C interface to the normal-reference two-sample test for equality of
 * high-dimensional covariance matrices.
 *
 * Conventions
 *  - Every fallible call returns an hdcov_status. HDCOV_OK is zero.
 *  - On failure a message is available from hdcov_last_error() until the next
 *    call on the same thread.
 *  - Objects are opaque handles created by *_create / *_read functions and
 *    released by the matching *_free function. Free functions accept NULL.
 *  - Handles are immutable after creation and may be shared across threads.
 */
#ifndef HDCOV_H
#define HDCOV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HDCOV_BUILDING)
#    define HDCOV_API __declspec(dllexport)
#  else
#    define HDCOV_API __declspec(dllimport)
#  endif
#else
#  define HDCOV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdcov_status {
  HDCOV_OK = 0,
  HDCOV_E_DIMENSION_MISMATCH = 1,
  HDCOV_E_TOO_FEW_OBSERVATIONS = 2,
  HDCOV_E_NONFINITE_ENTRY = 3,
  HDCOV_E_NONPOSITIVE_VARIANCE = 4,
  HDCOV_E_DEGENERATE_SAMPLE_SIZE = 5,
  HDCOV_E_INVALID_PARAMS = 6,
  HDCOV_E_DIMENSION_TOO_LARGE = 7,
  HDCOV_E_NOT_PSD = 8,
  HDCOV_E_EMPTY_LIST = 9,
  HDCOV_E_IO = 10,
  HDCOV_E_PARSE = 11,
  HDCOV_E_NULL_ARGUMENT = 12,
  HDCOV_E_BUFFER_TOO_SMALL = 13,
  HDCOV_E_INTERNAL = 99
} hdcov_status;

/* Symbolic name of a status, e.g. "DimensionMismatch". Never NULL. */
HDCOV_API const char* hdcov_status_name(hdcov_status status);

/* Message of the last failure on this thread, "" when none. */
HDCOV_API const char* hdcov_last_error(void);

HDCOV_API const char* hdcov_version(void);

/* ---- samples ----------------------------------------------------------- */

typedef struct hdcov_sample hdcov_sample;

/* Copies a row-major rows x cols array. */
HDCOV_API hdcov_status hdcov_sample_create(size_t rows, size_t cols,
                                           const double* row_major,
                                           hdcov_sample** out);
HDCOV_API hdcov_status hdcov_sample_read_csv(const char* path,
                                             hdcov_sample** out);
HDCOV_API hdcov_status hdcov_sample_write_csv(const hdcov_sample* sample,
                                              const char* path);
HDCOV_API size_t hdcov_sample_rows(const hdcov_sample* sample);
HDCOV_API size_t hdcov_sample_cols(const hdcov_sample* sample);
/* Copies the data row-major into `out`, which holds rows * cols doubles. */
HDCOV_API hdcov_status hdcov_sample_copy(const hdcov_sample* sample,
                                         double* out, size_t capacity);
HDCOV_API void hdcov_sample_free(hdcov_sample* sample);

/* ---- the test ---------------------------------------------------------- */

typedef enum hdcov_method {
  HDCOV_METHOD_THREE_CUMULANT_CHI2 = 0,
  HDCOV_METHOD_NORMAL_FALLBACK = 1
} hdcov_method;

typedef struct hdcov_report_values {
  double statistic;
  double normalized_statistic;
  double k2_hat;
  double k3_hat;
  double beta0; /* NaN under the normal fallback */
  double beta1; /* NaN under the normal fallback */
  double d;     /* NaN under the normal fallback */
  double p_value;
  hdcov_method method;
  size_t n1;
  size_t n2;
  size_t p;
  int centered;
} hdcov_report_values;

typedef struct hdcov_report hdcov_report;

/* Runs the test. `center` != 0 subtracts each group's mean first. */
HDCOV_API hdcov_status hdcov_test_run(const hdcov_sample* x,
                                      const hdcov_sample* y, int center,
                                      hdcov_report** out);

/* Same test through explicit p^2-dimensional induced vectors (p <= 12). */
HDCOV_API hdcov_status hdcov_oracle_report(const hdcov_sample* x,
                                           const hdcov_sample* y, int center,
                                           hdcov_report** out);

HDCOV_API hdcov_status hdcov_report_get(const hdcov_report* report,
                                        hdcov_report_values* out);

/* Writes the report as a flat JSON object. When `buffer` is NULL or too
 * small, `*needed` receives the required size including the terminator and
 * HDCOV_E_BUFFER_TOO_SMALL is returned (no error when buffer is NULL). */
HDCOV_API hdcov_status hdcov_report_json(const hdcov_report* report,
                                         char* buffer, size_t capacity,
                                         size_t* needed);
HDCOV_API void hdcov_report_free(hdcov_report* report);

/* ---- reference distribution -------------------------------------------- */

HDCOV_API hdcov_status hdcov_p_value(double t, double beta0, double beta1,
                                     double d, double* out);
HDCOV_API hdcov_status hdcov_p_value_normalized(double t_tilde, double d,
                                                double* out);
HDCOV_API hdcov_status hdcov_critical_value(double beta0, double beta1,
                                            double d, double alpha,
                                            double* out);
/* *is_fallback = 1 when k3 <= 0; beta0, beta1 and d are then NaN.
 * HDCOV_E_NONPOSITIVE_VARIANCE when k2 <= 0. */
HDCOV_API hdcov_status hdcov_match_params(double k2, double k3, double* beta0,
                                          double* beta1, double* d,
                                          int* is_fallback);

/* ---- simulations ------------------------------------------------------- */

typedef enum hdcov_model {
  HDCOV_MODEL_NORMAL = 0,
  HDCOV_MODEL_T5 = 1,
  HDCOV_MODEL_CHISQ1 = 2
} hdcov_model;

typedef enum hdcov_design {
  HDCOV_DESIGN_COMPOUND_SYMMETRY = 0,
  HDCOV_DESIGN_MOVING_AVERAGE = 1
} hdcov_design;

typedef enum hdcov_sigma_profile {
  HDCOV_SIGMA_CONSTANT4 = 0,
  HDCOV_SIGMA_UNIFORM_SHIFT = 1
} hdcov_sigma_profile;

typedef struct hdcov_sim_config {
  hdcov_model model;
  hdcov_design design;
  int p;
  int n1;
  int n2;
  double rho1;
  double rho2;
  hdcov_sigma_profile sigma_profile;
  int m1;
  int m2;
  double theta1_lo;
  double theta1_hi;
  double theta2_lo;
  double theta2_hi;
  int reps;
  double alpha;
  uint64_t seed;
  int center;
} hdcov_sim_config;

typedef struct hdcov_sim_result {
  double rejection_rate;
  double se;
  double mean_d;
  int reps;
  int failures;
  int fallbacks;
} hdcov_sim_result;

/* Null configuration: equal covariances. `rho` is ignored for moving
 * average. */
HDCOV_API hdcov_status hdcov_sim_size_config(hdcov_model model,
                                             hdcov_design design, int p,
                                             int n1, int n2, double rho,
                                             hdcov_sim_config* out);
/* Alternative configuration. rho1 / rho2 are ignored for moving average. */
HDCOV_API hdcov_status hdcov_sim_power_config(hdcov_model model,
                                              hdcov_design design, int p,
                                              int n1, int n2, double rho1,
                                              double rho2,
                                              hdcov_sim_config* out);

/* threads <= 0: hardware concurrency (HDCOV_THREADS overrides). */
HDCOV_API hdcov_status hdcov_simulate(const hdcov_sim_config* config,
                                      int threads, hdcov_sim_result* out);

/* Random-split empirical size of a single sample. */
HDCOV_API hdcov_status hdcov_split_size(const hdcov_sample* sample, int reps,
                                        double alpha, uint64_t seed,
                                        int center, int threads,
                                        hdcov_sim_result* out);

/* CSV rendering of a simulation result (header excluded). Buffer protocol as
 * in hdcov_report_json. */
HDCOV_API const char* hdcov_sim_csv_header(void);
HDCOV_API hdcov_status hdcov_sim_csv_row(const hdcov_sim_config* config,
                                         const hdcov_sim_result* result,
                                         char* buffer, size_t capacity,
                                         size_t* needed);

HDCOV_API hdcov_status hdcov_are(const double* sizes, size_t count,
                                 double alpha, double* out);
HDCOV_API hdcov_status hdcov_asymptotic_power(double n, double tau,
                                              double tr_omega_sq,
                                              double frob_sq_diff,
                                              double alpha, double* out);

/* ---- mixture oracle ---------------------------------------------------- */

typedef struct hdcov_mixture hdcov_mixture;

/* Exact normal-reference mixture for two p x p covariances (row-major,
 * p <= 12) under the given innovation model. */
HDCOV_API hdcov_status hdcov_mixture_create(size_t p, const double* sigma1,
                                            const double* sigma2, int n1,
                                            int n2, hdcov_model model,
                                            hdcov_mixture** out);
/* Exact variance and third cumulant. */
HDCOV_API hdcov_status hdcov_mixture_cumulants(const hdcov_mixture* mixture,
                                               double* k2, double* k3);
/* Writes `count` draws into `out`. */
HDCOV_API hdcov_status hdcov_mixture_sample(const hdcov_mixture* mixture,
                                            size_t count, uint64_t seed,
                                            int threads, double* out);
HDCOV_API void hdcov_mixture_free(hdcov_mixture* mixture);

/* ---- self validation --------------------------------------------------- */

typedef struct hdcov_validate_options {
  int max_p;
  int instances;
  size_t mixture_draws;
  uint64_t seed;
  int perturb_gram;
} hdcov_validate_options;

HDCOV_API void hdcov_validate_defaults(hdcov_validate_options* out);

/* Called once per check. */
typedef void (*hdcov_check_sink)(const char* name, int passed,
                                 const char* detail, void* user);

/* *all_passed is 1 iff every check passed. */
HDCOV_API hdcov_status hdcov_validate(const hdcov_validate_options* options,
                                      hdcov_check_sink sink, void* user,
                                      int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* HDCOV_H */
