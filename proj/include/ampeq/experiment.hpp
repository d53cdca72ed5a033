#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ampeq/amplitude.hpp"
#include "ampeq/model.hpp"
#include "ampeq/spde.hpp"

namespace ampeq {

struct ExperimentConfig {
  CaseTag case_tag = CaseTag::CaseI;
  std::vector<double> epsilons;  // strictly decreasing
  double h = 20.0;
  double t0 = 1.0;       // slow horizon
  int n_samples = 100;
  int n_modes = 32;
  int n_quad = 128;
  double dt = 1e-3;      // fast step; coarsened per epsilon to honor max_steps
  double kappa = 0.04;
  std::uint64_t seed = 1;
  bool include_K = true;
  Case2Driver driver = Case2Driver::SharedSigned;
  int threads = 0;       // 0 = hardware concurrency
  std::int64_t max_snapshots = 2000;
  std::int64_t max_steps = 2000000;
  double sigma_tol = 1e-12;
  std::string output_path;

  void validate() const;  // throws std::invalid_argument
};

/// Per-epsilon aggregates. mean/se arrays are indexed by snapshot; the
/// alt arrays carry the other include_K variant of the same errors.
struct EpsilonErrors {
  double epsilon = 0.0;
  double dt = 0.0;
  std::int64_t n_steps = 0;
  std::int64_t stride = 1;
  int samples_used = 0;
  int blowup_count = 0;
  int exceedance_count = 0;
  double clamp_fraction = 0.0;
  std::vector<double> times;  // fast snapshot times
  std::vector<double> mean_first, se_first, mean_second, se_second;
  std::vector<double> alt_mean_first, alt_se_first, alt_mean_second, alt_se_second;
  std::vector<double> sup_first, sup_second;  // per retained sample
  double mean_sup_first = 0.0;
  double mean_sup_second = 0.0;
};

struct SlopeFit {
  bool ok = false;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n_points = 0;
  std::vector<std::string> warnings;
};

struct ErrorReport {
  CaseTag case_tag = CaseTag::CaseI;
  bool include_K = true;
  std::string driver_name;
  double h = 0.0;
  std::uint64_t seed = 0;
  std::vector<EpsilonErrors> per_epsilon;
  SlopeFit slope_first, slope_second;
  bool aborted = false;
  std::string abort_reason;
  SpdeTrajectory sample0_trajectory;  // first sample of the largest epsilon
  AmplitudePath sample0_amplitude;    // strided to the snapshot grid
};

/// Coupled Monte Carlo comparison of the solver against the assembled
/// amplitude approximations; aggregation order is fixed by sample index, so
/// results are independent of the thread count. custom_model overrides the
/// built-in bundle (used to exercise degenerate configurations).
ErrorReport run_comparison(const ExperimentConfig& config,
                           const ModelSpec* custom_model = nullptr);

/// Least squares on (ln eps, ln error). Non-positive errors are excluded with
/// a warning; fewer than 3 surviving points throws std::runtime_error.
SlopeFit fit_convergence_order(
    const std::vector<std::pair<double, double>>& sup_errors);

/// Same fit plus a percentile bootstrap CI over the per-sample sup errors.
SlopeFit fit_convergence_order_bootstrap(
    const std::vector<double>& epsilons,
    const std::vector<std::vector<double>>& per_sample_sups, std::uint64_t seed,
    int replicates = 400);

/// Writes errors.csv, summary.csv, plot.gp and run_meta.txt into dir
/// (plus errors_alt.csv and the sample-0 trajectory/amplitude CSVs when
/// present). Creates the directory if needed.
void emit_report(const ErrorReport& report, const std::string& dir);

struct TimeRow {
  int case_tag = 0;
  double epsilon = 0, t = 0, slow_t = 0;
  double mean_first = 0, se_first = 0, mean_second = 0, se_second = 0;
};

struct SummaryRow {
  double epsilon = 0, sup_first = 0, sup_second = 0;
  double slope_first = 0, slope_second = 0, clamp_fraction = 0;
  long exceedance_count = 0;
};

std::vector<TimeRow> parse_time_csv(const std::string& path);
std::vector<SummaryRow> parse_summary_csv(const std::string& path);

const char* driver_name(Case2Driver driver);
Case2Driver driver_from_name(const std::string& name);

}  // namespace ampeq
