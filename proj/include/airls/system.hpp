#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace airls {

/// x_{t+1} = A x_t + B u_t
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  LinearSystem() = default;
  LinearSystem(Eigen::MatrixXd a, Eigen::MatrixXd b);

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index n_u() const { return B.cols(); }
  Eigen::Index m() const { return 2 * n() + n_u(); }

  /// [A, B]
  Eigen::MatrixXd theta() const;

  /// The two-state, two-input benchmark system.
  static LinearSystem benchmark();
};

struct NoiseConfig {
  /// false disables all measurement corruption (noisy fields equal true ones).
  bool enabled = true;
  /// Per-channel signal power over Gaussian noise variance.
  double snr = 100.0;
  double outlier_ratio = 0.0;
  double outlier_low = -0.2;
  double outlier_high = 0.2;
  std::uint64_t seed = 0;

  static NoiseConfig off() {
    NoiseConfig cfg;
    cfg.enabled = false;
    return cfg;
  }

  void validate() const;
};

struct TrajectorySample {
  std::int64_t t = 0;
  Eigen::VectorXd x_next, x, u;
  Eigen::VectorXd x_next_noisy, x_noisy, u_noisy;
  bool is_outlier = false;

  /// (x_{t+1}, x_t, u_t), measured or true.
  Eigen::VectorXd stacked(bool noisy) const;
};

Eigen::VectorXd simulate_step(const LinearSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& u);

/// Simulates N steps from x0 under i.i.d. Gaussian inputs with standard
/// deviation input_std, then corrupts the measurements.
///
/// Every measured state and input carries Gaussian noise whose variance is the
/// channel's mean signal power divided by snr (one measurement per time
/// instant, shared by the two samples that contain it). Exactly
/// round(outlier_ratio * N) samples, drawn without replacement, additionally
/// get U[outlier_low, outlier_high] noise on every component of their
/// (x_{t+1}, x_t, u_t) triple. Output is a pure function of the arguments.
std::vector<TrajectorySample> generate_trajectory(const LinearSystem& sys,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x0,
                                                  double input_std, std::int64_t N,
                                                  const NoiseConfig& noise);

}  // namespace airls
