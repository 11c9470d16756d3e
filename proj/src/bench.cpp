#include "airls/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "airls/errors.hpp"

namespace airls {

double rel_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& truth,
                           const Eigen::Ref<const Eigen::MatrixXd>& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw DimensionMismatch("rel_frobenius_error: shapes differ");
  }
  const double denom = truth.norm();
  if (denom == 0.0) {
    throw ZeroTruth("rel_frobenius_error: true parameters are zero");
  }
  return 100.0 * (truth - estimate).norm() / denom;
}

// ---------------------------------------------------------------------------

double EstimatorSpec::beta() const {
  if (kind == "rtls") return rtls.beta;
  if (kind == "rls") return rls.beta;
  return airls.beta;
}

void EstimatorSpec::validate() const {
  if (name.empty()) {
    throw ConfigError("estimator name must not be empty");
  }
  try {
    if (kind == "airls") {
      airls.validate();
      if (!(psi_scale >= 0.0)) {
        throw std::invalid_argument("psi must be non-negative");
      }
    } else if (kind == "rtls") {
      rtls.validate();
    } else if (kind == "rls") {
      rls.validate();
    } else {
      throw ConfigError("estimator '" + name + "': unknown kind '" + kind + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("estimator '" + name + "': " + e.what());
  }
}

std::unique_ptr<Estimator> EstimatorSpec::make(Eigen::Index n, Eigen::Index n_u) const {
  if (kind == "airls") {
    return std::make_unique<AirlsEstimator>(n, n_u, airls, Regularization::scaled_identity(n, n_u, psi_scale));
  }
  if (kind == "rtls") {
    return std::make_unique<RtlsEstimator>(n, n_u, rtls);
  }
  if (kind == "rls") {
    return std::make_unique<RlsEstimator>(n, n_u, rls);
  }
  throw ConfigError("unknown estimator kind '" + kind + "'");
}

EstimatorSpec EstimatorSpec::named(const std::string& kind) {
  EstimatorSpec spec;
  spec.name = kind;
  spec.kind = kind;
  return spec;
}

ExperimentConfig::ExperimentConfig()
    : ratios(default_ratio_grid()),
      estimators{EstimatorSpec::named("airls"), EstimatorSpec::named("rtls"), EstimatorSpec::named("rls")} {}

void ExperimentConfig::validate() const {
  if (system.A.rows() == 0 || system.A.rows() != system.A.cols() || system.B.rows() != system.A.rows()) {
    throw ConfigError("system: A must be square and B must have as many rows as A");
  }
  if (x0.size() != system.n()) {
    throw ConfigError("system: x0 length must equal the state dimension");
  }
  if (!(input_std >= 0.0)) {
    throw ConfigError("system: input_std must be non-negative");
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  if (N < 1 || fast_N < 1 || simulate_N < 1) {
    throw ConfigError("sweep: N, fast_N and simulate N must be at least 1");
  }
  if (trials < 1) {
    throw ConfigError("sweep: trials must be at least 1");
  }
  if (ratios.empty()) {
    throw ConfigError("sweep: ratio list is empty");
  }
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] >= 0.0 && ratios[i] <= 1.0)) {
      throw ConfigError("sweep: ratios must lie in [0, 1]");
    }
    if (i > 0 && !(ratios[i] > ratios[i - 1])) {
      throw ConfigError("sweep: ratios must be strictly ascending");
    }
  }
  if (estimators.empty()) {
    throw ConfigError("no estimators configured");
  }
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    estimators[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (estimators[j].name == estimators[i].name) {
        throw ConfigError("duplicate estimator name '" + estimators[i].name + "'");
      }
    }
  }
}

const EstimatorSpec* ExperimentConfig::find_estimator(const std::string& name) const {
  for (const auto& e : estimators) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
    throw ConfigError("log_spaced: need 0 < lo <= hi and at least one point");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_ratio_grid() { return log_spaced(1e-4, 5e-2, 20); }

// ---------------------------------------------------------------------------

BetaBoundMonitor::BetaBoundMonitor(double beta, std::int64_t burn_in) : beta_(beta), burn_in_(burn_in) {}

void BetaBoundMonitor::observe(const Eigen::Ref<const Eigen::VectorXd>& sample,
                               const Eigen::Ref<const Eigen::MatrixXd>& C) {
  ++seen_;
  gamma_max_ = std::max(gamma_max_, sample.squaredNorm());
  if (seen_ <= burn_in_) {
    return;
  }
  const Eigen::MatrixXd sym = 0.5 * (1.0 - beta_) * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  gamma_min_ = have_min_ ? std::min(gamma_min_, lmin) : lmin;
  have_min_ = true;
}

bool BetaBoundMonitor::ok() const {
  if (!have_min_ || !(gamma_min_ > 0.0) || gamma_min_ > gamma_max_) {
    return false;
  }
  return check_beta_bound(gamma_max_, gamma_min_, beta_);
}

std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t ratio_index, int trial) {
  return seed_base + 1000u * static_cast<std::uint64_t>(ratio_index) + static_cast<std::uint64_t>(trial);
}

namespace {

std::vector<TrajectorySample> trial_trace(const ExperimentConfig& cfg, double ratio, std::uint64_t seed,
                                          std::int64_t N) {
  NoiseConfig noise = cfg.noise;
  noise.outlier_ratio = ratio;
  noise.seed = seed;
  return generate_trajectory(cfg.system, cfg.x0, cfg.input_std, N, noise);
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, const EstimatorSpec& spec,
                      const std::vector<TrajectorySample>& trace, double ratio, std::uint64_t seed) {
  TrialResult r;
  r.estimator = spec.name;
  r.outlier_ratio = ratio;
  r.seed = seed;
  const auto N = static_cast<std::int64_t>(trace.size());
  const double beta = spec.beta();
  const auto burn_in =
      std::min<std::int64_t>(N / 2, static_cast<std::int64_t>(std::ceil(3.0 / (1.0 - std::min(beta, 0.999999)))));
  const auto start = std::chrono::steady_clock::now();
  try {
    auto est = spec.make(cfg.system.n(), cfg.system.n_u());
    BetaBoundMonitor monitor(beta, burn_in);
    for (const auto& s : trace) {
      est->step(s);
      monitor.observe(s.stacked(true), est->correlation());
    }
    const Eigen::MatrixXd theta = est->theta();
    if (!theta.allFinite()) {
      throw SingularMatrix("estimate is not finite");
    }
    r.eps_F = rel_frobenius_error(cfg.system.theta(), theta);
    r.state_rmse = state_rmse(*est, trace, cfg.rmse_window);
    r.beta_bound_ok = monitor.ok();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
    r.eps_F = std::numeric_limits<double>::quiet_NaN();
    r.state_rmse = std::numeric_limits<double>::quiet_NaN();
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

TrialResult run_trial(const ExperimentConfig& cfg, const EstimatorSpec& spec, double ratio, std::uint64_t seed,
                      std::int64_t N) {
  return run_trial(cfg, spec, trial_trace(cfg, ratio, seed, N), ratio, seed);
}

unsigned sweep_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AIRLS_THREADS")) {
    unsigned cap = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec != std::errc() || ptr != s.data() + s.size() || cap == 0) {
      throw ConfigError("AIRLS_THREADS must be a positive integer");
    }
    hw = std::min(hw, cap);
  }
  return hw;
}

SweepResult run_sweep(const ExperimentConfig& cfg, bool fast, unsigned threads) {
  cfg.validate();
  const std::int64_t N = fast ? cfg.fast_N : cfg.N;
  const std::size_t n_ratios = cfg.ratios.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_est = cfg.estimators.size();
  const std::size_t cells = n_ratios * n_trials;

  // results[(ratio * trials + trial) * n_est + estimator]
  std::vector<TrialResult> results(cells * n_est);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const std::size_t ri = c / n_trials;
      const int trial = static_cast<int>(c % n_trials);
      const std::uint64_t seed = trial_seed(cfg.seed_base, ri, trial);
      const auto trace = trial_trace(cfg, cfg.ratios[ri], seed, N);
      for (std::size_t e = 0; e < n_est; ++e) {
        results[c * n_est + e] = run_trial(cfg, cfg.estimators[e], trace, cfg.ratios[ri], seed);
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads == 0 ? sweep_threads() : threads,
                                                           static_cast<unsigned>(cells)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  SweepResult out;
  out.trials = results;
  for (std::size_t e = 0; e < n_est; ++e) {
    for (std::size_t ri = 0; ri < n_ratios; ++ri) {
      SweepRow row;
      row.estimator = cfg.estimators[e].name;
      row.ratio = cfg.ratios[ri];
      std::vector<double> eps;
      double rmse = 0.0;
      for (std::size_t k = 0; k < n_trials; ++k) {
        const auto& t = results[(ri * n_trials + k) * n_est + e];
        if (t.ok) {
          eps.push_back(t.eps_F);
          rmse += t.state_rmse;
        } else {
          ++row.failed;
        }
      }
      row.trials = static_cast<int>(eps.size());
      if (eps.empty()) {
        row.eps_F_mean = row.eps_F_std = row.rmse_mean = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double v : eps) sum += v;
        row.eps_F_mean = sum / static_cast<double>(eps.size());
        double ss = 0.0;
        for (double v : eps) ss += (v - row.eps_F_mean) * (v - row.eps_F_mean);
        row.eps_F_std = eps.size() > 1 ? std::sqrt(ss / static_cast<double>(eps.size() - 1)) : 0.0;
        row.rmse_mean = rmse / static_cast<double>(eps.size());
      }
      out.rows.push_back(row);
    }
  }
  out.rows = merge_rows(std::move(out.rows), {});
  return out;
}

// ---------------------------------------------------------------------------

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "estimator,ratio,eps_F_mean,eps_F_std,rmse_mean,trials\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.estimator, r.ratio, r.eps_F_mean, r.eps_F_std, r.rmse_mean,
                       r.trials);
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("estimator,ratio,eps_F_mean,eps_F_std,rmse_mean,trials", 0) != 0) {
    throw ConfigError("sweep CSV: unexpected header");
  }
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 6) {
      throw ConfigError(fmt::format("sweep CSV: line {} has {} fields, expected 6", lineno, f.size()));
    }
    SweepRow r;
    r.estimator = f[0];
    try {
      r.ratio = std::stod(f[1]);
      r.eps_F_mean = std::stod(f[2]);
      r.eps_F_std = std::stod(f[3]);
      r.rmse_mean = std::stod(f[4]);
      r.trials = std::stoi(f[5]);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("sweep CSV: line {} is not numeric", lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> merge_rows(std::vector<SweepRow> rows, const std::vector<SweepRow>& extra) {
  rows.insert(rows.end(), extra.begin(), extra.end());
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.estimator != b.estimator) return a.estimator < b.estimator;
    return a.ratio < b.ratio;
  });
  return rows;
}

// ---------------------------------------------------------------------------

void reconstruct_states(const Estimator& estimator, const std::vector<TrajectorySample>& trace, std::ostream& out) {
  const Eigen::Index n = estimator.n();
  std::string line = "t";
  for (Eigen::Index i = 1; i <= n; ++i) line += fmt::format(",x{}_true", i);
  for (Eigen::Index i = 1; i <= n; ++i) line += fmt::format(",x{}_hat", i);
  out << line << '\n';
  for (const auto& s : trace) {
    const PointEstimate p = estimator.point_estimate(s);
    line = fmt::format("{}", s.t + 1);
    for (Eigen::Index i = 0; i < n; ++i) line += fmt::format(",{}", s.x_next(i));
    for (Eigen::Index i = 0; i < n; ++i) line += fmt::format(",{}", p.x_next_hat(i));
    out << line << '\n';
  }
}

double state_rmse(const Estimator& estimator, const std::vector<TrajectorySample>& trace, std::int64_t window) {
  const auto total = static_cast<std::int64_t>(trace.size());
  const std::int64_t first = window > 0 ? std::max<std::int64_t>(0, total - window) : 0;
  double ss = 0.0;
  std::int64_t count = 0;
  for (std::int64_t k = first; k < total; ++k) {
    const auto& s = trace[static_cast<std::size_t>(k)];
    ss += (estimator.point_estimate(s).x_next_hat - s.x_next).squaredNorm();
    count += s.x_next.size();
  }
  return count > 0 ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
}

}  // namespace airls
