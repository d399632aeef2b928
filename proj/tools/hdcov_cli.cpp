// hdcov command-line tool. Talks to the library through the C interface only.

#include "hdcov/hdcov.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

// Carries a status out of a subcommand so main can pick the exit code.
struct Failure {
  hdcov_status status;
  std::string message;
};

void check(hdcov_status status) {
  if (status != HDCOV_OK) throw Failure{status, hdcov_last_error()};
}

struct SampleDeleter {
  void operator()(hdcov_sample* s) const { hdcov_sample_free(s); }
};
struct ReportDeleter {
  void operator()(hdcov_report* r) const { hdcov_report_free(r); }
};
struct MixtureDeleter {
  void operator()(hdcov_mixture* m) const { hdcov_mixture_free(m); }
};
using SamplePtr = std::unique_ptr<hdcov_sample, SampleDeleter>;
using ReportPtr = std::unique_ptr<hdcov_report, ReportDeleter>;
using MixturePtr = std::unique_ptr<hdcov_mixture, MixtureDeleter>;

SamplePtr read_sample(const std::string& path) {
  hdcov_sample* s = nullptr;
  check(hdcov_sample_read_csv(path.c_str(), &s));
  return SamplePtr(s);
}

// Writes `text` to `path`, or stdout when the path is empty.
void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{HDCOV_E_IO, "cannot write " + path};
  out << text;
  if (!out) throw Failure{HDCOV_E_IO, "write failed for " + path};
}

std::string report_json(const hdcov_report* report) {
  size_t needed = 0;
  check(hdcov_report_json(report, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(hdcov_report_json(report, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

std::string csv_row(const hdcov_sim_config& config,
                    const hdcov_sim_result& result) {
  size_t needed = 0;
  check(hdcov_sim_csv_row(&config, &result, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(hdcov_sim_csv_row(&config, &result, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct TestArgs {
  std::string x_path;
  std::string y_path;
  bool no_center = false;
  std::string out;
};

int run_test(const TestArgs& a) {
  const SamplePtr x = read_sample(a.x_path);
  const SamplePtr y = read_sample(a.y_path);
  hdcov_report* raw = nullptr;
  check(hdcov_test_run(x.get(), y.get(), a.no_center ? 0 : 1, &raw));
  const ReportPtr report(raw);
  hdcov_report_values v{};
  check(hdcov_report_get(report.get(), &v));
  if (v.method == HDCOV_METHOD_NORMAL_FALLBACK) {
    std::cerr << "warning: estimated third cumulant is not positive; "
                 "p-value uses the normal approximation\n";
  }
  emit(report_json(report.get()) + "\n", a.out);
  return kExitOk;
}

struct SimArgs {
  int model = 1;
  std::string design = "cs";
  int p = 50;
  int n1 = 50;
  int n2 = 80;
  double rho = 0.25;
  double rho1 = 0.5;
  double rho2 = 0.25;
  int reps = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  int threads = 0;
  bool no_center = false;
  std::string out;
};

hdcov_design parse_design(const std::string& s) {
  if (s == "cs") return HDCOV_DESIGN_COMPOUND_SYMMETRY;
  return HDCOV_DESIGN_MOVING_AVERAGE;
}

hdcov_model to_model(int m) { return static_cast<hdcov_model>(m - 1); }

int run_simulation(const SimArgs& a, bool power) {
  hdcov_sim_config config{};
  const hdcov_design design = parse_design(a.design);
  if (power) {
    check(hdcov_sim_power_config(to_model(a.model), design, a.p, a.n1, a.n2,
                                 a.rho1, a.rho2, &config));
  } else {
    check(hdcov_sim_size_config(to_model(a.model), design, a.p, a.n1, a.n2,
                                a.rho, &config));
  }
  config.reps = a.reps;
  config.alpha = a.alpha;
  config.seed = a.seed;
  config.center = a.no_center ? 0 : 1;
  hdcov_sim_result result{};
  check(hdcov_simulate(&config, a.threads, &result));
  emit(std::string(hdcov_sim_csv_header()) + "\n" + csv_row(config, result) +
           "\n",
       a.out);
  return kExitOk;
}

struct OracleArgs {
  int p = 3;
  double rho = 0.3;
  std::optional<double> rho2;
  int n1 = 10;
  int n2 = 15;
  int model = 1;
  std::size_t draws = 100000;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
};

std::vector<double> cs_matrix(int p, double rho) {
  std::vector<double> m(static_cast<std::size_t>(p) * p, rho);
  for (int i = 0; i < p; ++i) m[static_cast<std::size_t>(i) * p + i] = 1.0;
  return m;
}

int run_oracle(const OracleArgs& a) {
  const auto s1 = cs_matrix(a.p, a.rho);
  const auto s2 = cs_matrix(a.p, a.rho2.value_or(a.rho));
  hdcov_mixture* raw = nullptr;
  check(hdcov_mixture_create(static_cast<size_t>(a.p), s1.data(), s2.data(),
                             a.n1, a.n2, to_model(a.model), &raw));
  const MixturePtr mixture(raw);
  std::vector<double> draws(a.draws);
  check(hdcov_mixture_sample(mixture.get(), a.draws, a.seed, a.threads,
                             draws.data()));
  std::string text = "draw\n";
  text.reserve(a.draws * 24);
  for (double v : draws) text += fmt17(v) + "\n";
  emit(text, a.out);
  return kExitOk;
}

struct ValidateArgs {
  int p = 4;
  int instances = 50;
  std::size_t draws = 200000;
  std::uint64_t seed = 20240607;
  bool perturb = false;
};

int run_validate(const ValidateArgs& a) {
  hdcov_validate_options options{};
  hdcov_validate_defaults(&options);
  options.max_p = a.p;
  options.instances = a.instances;
  options.mixture_draws = a.draws;
  options.seed = a.seed;
  options.perturb_gram = a.perturb ? 1 : 0;
  std::string first_failure;
  auto sink = [](const char* name, int passed, const char* detail, void* user) {
    std::cout << (passed ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    auto* first = static_cast<std::string*>(user);
    if (!passed && first->empty()) *first = name;
  };
  int all_passed = 0;
  check(hdcov_validate(&options, sink, &first_failure, &all_passed));
  if (!all_passed) {
    std::cerr << "validation failed: " << first_failure << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

struct SplitArgs {
  std::string path;
  int reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  int threads = 0;
  bool no_center = false;
  std::string out;
};

int run_split(const SplitArgs& a) {
  const SamplePtr x = read_sample(a.path);
  hdcov_sim_result r{};
  check(hdcov_split_size(x.get(), a.reps, a.alpha, a.seed, a.no_center ? 0 : 1,
                         a.threads, &r));
  std::string text = "n,p,reps,alpha,rejection_rate,se,mean_d,failures,seed\n";
  text += std::to_string(hdcov_sample_rows(x.get())) + "," +
          std::to_string(hdcov_sample_cols(x.get())) + "," +
          std::to_string(r.reps) + "," + fmt17(a.alpha) + "," +
          fmt17(r.rejection_rate) + "," + fmt17(r.se) + "," +
          fmt17(r.mean_d) + "," + std::to_string(r.failures) + "," +
          std::to_string(a.seed) + "\n";
  emit(text, a.out);
  return kExitOk;
}

void add_sim_flags(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--model", a.model, "innovation model: 1 normal, 2 t5, 3 chisq1")
      ->check(CLI::Range(1, 3));
  cmd->add_option("--design", a.design, "cs (compound symmetry) or ma (moving average)")
      ->check(CLI::IsMember({"cs", "ma"}));
  cmd->add_option("--p", a.p, "dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--n1", a.n1, "first sample size")->check(CLI::Range(4, 1 << 20));
  cmd->add_option("--n2", a.n2, "second sample size")->check(CLI::Range(4, 1 << 20));
  cmd->add_option("--reps", a.reps, "replications")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", a.alpha, "nominal level")
      ->check(CLI::Range(0.0, 1.0).description("in (0,1)"));
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--threads", a.threads, "worker threads, 0 = all cores (HDCOV_THREADS overrides)");
  cmd->add_flag("--no-center", a.no_center, "skip centering by the group means");
  cmd->add_option("--out", a.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sample test for equality of high-dimensional covariance matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hdcov_version()));

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "run the test on two CSV samples");
  test->add_option("x", test_args.x_path, "first sample (rows are observations)")
      ->required()->check(CLI::ExistingFile);
  test->add_option("y", test_args.y_path, "second sample")
      ->required()->check(CLI::ExistingFile);
  test->add_flag("--no-center", test_args.no_center, "skip centering by the group means");
  test->add_option("--out", test_args.out, "output file (default stdout)");

  SimArgs size_args;
  auto* sim_size = app.add_subcommand("simulate-size", "empirical size under equal covariances");
  add_sim_flags(sim_size, size_args);
  auto* rho_opt = sim_size->add_option("--rho", size_args.rho, "compound-symmetry correlation");

  SimArgs power_args;
  auto* sim_power = app.add_subcommand("simulate-power", "empirical power under unequal covariances");
  add_sim_flags(sim_power, power_args);
  auto* rho1_opt = sim_power->add_option("--rho1", power_args.rho1, "first-group correlation");
  auto* rho2_opt = sim_power->add_option("--rho2", power_args.rho2, "second-group correlation");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "sample the exact normal-reference mixture");
  oracle->add_option("--p", oracle_args.p, "dimension (<= 12)")->check(CLI::PositiveNumber);
  oracle->add_option("--rho", oracle_args.rho, "compound-symmetry correlation of group 1");
  oracle->add_option("--rho2", oracle_args.rho2, "correlation of group 2 (default: --rho)");
  oracle->add_option("--n1", oracle_args.n1, "first sample size")->check(CLI::Range(2, 1 << 20));
  oracle->add_option("--n2", oracle_args.n2, "second sample size")->check(CLI::Range(2, 1 << 20));
  oracle->add_option("--model", oracle_args.model, "innovation model: 1, 2 or 3")
      ->check(CLI::Range(1, 3));
  oracle->add_option("--draws", oracle_args.draws, "number of draws")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oracle_args.seed, "random seed");
  oracle->add_option("--threads", oracle_args.threads, "worker threads");
  oracle->add_option("--out", oracle_args.out, "output file (default stdout)");

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "run the built-in consistency checks");
  validate->add_option("--p", validate_args.p, "largest dimension of the explicit routes");
  validate->add_option("--instances", validate_args.instances, "seeded instances")
      ->check(CLI::PositiveNumber);
  validate->add_option("--draws", validate_args.draws, "mixture draws")
      ->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_args.seed, "random seed");
  validate->add_flag("--perturb-gram", validate_args.perturb,
                     "negative control: perturb one Gram entry");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split-size", "random-split empirical size of one sample");
  split->add_option("x", split_args.path, "sample CSV")->required()->check(CLI::ExistingFile);
  split->add_option("--reps", split_args.reps, "random splits")->check(CLI::PositiveNumber);
  split->add_option("--alpha", split_args.alpha, "nominal level")
      ->check(CLI::Range(0.0, 1.0).description("in (0,1)"));
  split->add_option("--seed", split_args.seed, "random seed");
  split->add_option("--threads", split_args.threads, "worker threads");
  split->add_flag("--no-center", split_args.no_center, "skip centering by the group means");
  split->add_option("--out", split_args.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
    for (double alpha : {size_args.alpha, power_args.alpha, split_args.alpha}) {
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw CLI::ValidationError("--alpha", "must lie strictly between 0 and 1");
      }
    }
    if (size_args.design == "ma" && rho_opt->count() > 0) {
      throw CLI::ValidationError("--rho", "not used by the moving-average design");
    }
    if (power_args.design == "ma" && (rho1_opt->count() + rho2_opt->count()) > 0) {
      throw CLI::ValidationError("--rho1/--rho2", "not used by the moving-average design");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*test) return run_test(test_args);
    if (*sim_size) return run_simulation(size_args, false);
    if (*sim_power) return run_simulation(power_args, true);
    if (*oracle) return run_oracle(oracle_args);
    if (*validate) return run_validate(validate_args);
    if (*split) return run_split(split_args);
  } catch (const Failure& f) {
    std::cerr << "error (" << hdcov_status_name(f.status) << "): " << f.message << "\n";
    return f.status == HDCOV_E_INTERNAL ? kExitInternal : kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
