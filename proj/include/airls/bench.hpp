#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "airls/airls.hpp"
#include "airls/baselines.hpp"
#include "airls/estimator.hpp"
#include "airls/system.hpp"

namespace airls {

/// 100 * ||truth - estimate||_F / ||truth||_F. Throws ZeroTruth when truth is 0.
double rel_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& truth,
                           const Eigen::Ref<const Eigen::MatrixXd>& estimate);

/// A named estimator configuration; `kind` selects the algorithm.
struct EstimatorSpec {
  std::string name = "airls";
  std::string kind = "airls";
  EstimatorConfig airls;
  /// Psi = psi_scale * I, mu = 0 for the parameter prior.
  double psi_scale = 1e-3;
  RtlsConfig rtls;
  RlsConfig rls;

  double beta() const;
  void validate() const;
  std::unique_ptr<Estimator> make(Eigen::Index n, Eigen::Index n_u) const;

  static EstimatorSpec named(const std::string& kind);
};

struct ExperimentConfig {
  LinearSystem system = LinearSystem::benchmark();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  double input_std = 0.1;
  /// Outlier ratio and seed are overwritten per trial during sweeps.
  NoiseConfig noise;

  std::int64_t N = 50000;
  std::int64_t fast_N = 5000;
  int trials = 10;
  std::vector<double> ratios;
  std::uint64_t seed_base = 1;
  std::vector<EstimatorSpec> estimators;
  /// Trailing samples used for the state-reconstruction RMSE.
  std::int64_t rmse_window = 1000;

  /// Settings of the `simulate` command.
  std::int64_t simulate_N = 1000;

  ExperimentConfig();
  void validate() const;
  const EstimatorSpec* find_estimator(const std::string& name) const;
};

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int points);
/// The default sweep grid: 20 points from 1e-4 to 5e-2.
std::vector<double> default_ratio_grid();

struct TrialResult {
  std::string estimator;
  double outlier_ratio = 0.0;
  double eps_F = 0.0;
  double state_rmse = 0.0;
  double runtime_ms = 0.0;
  /// True when the step-size bound held along the run (empirical gammas).
  bool beta_bound_ok = false;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

/// Tracks empirical gamma_max (largest squared sample norm) and gamma_min
/// (smallest eigenvalue of the symmetric part of (1 - beta) C after burn_in
/// steps) over a run, for check_beta_bound.
class BetaBoundMonitor {
 public:
  BetaBoundMonitor(double beta, std::int64_t burn_in);
  void observe(const Eigen::Ref<const Eigen::VectorXd>& sample, const Eigen::Ref<const Eigen::MatrixXd>& C);
  double gamma_max() const { return gamma_max_; }
  double gamma_min() const { return gamma_min_; }
  bool ok() const;

 private:
  double beta_;
  std::int64_t burn_in_;
  std::int64_t seen_ = 0;
  double gamma_max_ = 0.0;
  double gamma_min_ = 0.0;
  bool have_min_ = false;
};

/// Trial seed for ratio index r and trial index k.
std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t ratio_index, int trial);

/// Generates the trace for (ratio, seed), streams it through the estimator
/// and scores it. Estimator failures produce ok = false instead of throwing.
TrialResult run_trial(const ExperimentConfig& cfg, const EstimatorSpec& spec, double ratio, std::uint64_t seed,
                      std::int64_t N);
TrialResult run_trial(const ExperimentConfig& cfg, const EstimatorSpec& spec,
                      const std::vector<TrajectorySample>& trace, double ratio, std::uint64_t seed);

struct SweepRow {
  std::string estimator;
  double ratio = 0.0;
  double eps_F_mean = 0.0;
  double eps_F_std = 0.0;
  double rmse_mean = 0.0;
  /// Successful trials in the cell.
  int trials = 0;
  int failed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<TrialResult> trials;
};

/// Runs estimators x ratios x trials with at most `threads` workers (0 means
/// sweep_threads()). Rows are sorted by (estimator, ratio).
SweepResult run_sweep(const ExperimentConfig& cfg, bool fast = false, unsigned threads = 0);

/// Worker count: hardware concurrency, capped by AIRLS_THREADS when set.
unsigned sweep_threads();

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Reads a sweep CSV (e.g. results of an external estimator) for merging.
std::vector<SweepRow> read_sweep_csv(std::istream& in);
/// Concatenates and re-sorts by (estimator, ratio).
std::vector<SweepRow> merge_rows(std::vector<SweepRow> rows, const std::vector<SweepRow>& extra);

/// Per-sample true state and reconstructed state: rows `t,x_true..,x_hat..`.
void reconstruct_states(const Estimator& estimator, const std::vector<TrajectorySample>& trace, std::ostream& out);

/// RMSE of the reconstructed x_hat against the true x over the last `window`
/// samples of the trace (all samples when window <= 0).
double state_rmse(const Estimator& estimator, const std::vector<TrajectorySample>& trace, std::int64_t window);

}  // namespace airls
