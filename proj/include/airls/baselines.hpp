#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "airls/estimator.hpp"
#include "airls/system.hpp"

namespace airls {

// ---------------------------------------------------------------------------
// Recursive total least squares

struct RtlsConfig {
  double beta = 0.995;
  /// Inverse-power iterations per sample.
  int power_iters = 2;
  /// Initial measured correlation is c0_scale * I_m.
  double c0_scale = 1.0;
  /// Diagonal jitter (relative to trace / m) used when C is not invertible.
  double jitter = 1e-12;

  void validate() const;
};

struct RtlsState {
  Eigen::MatrixXd C_tilde;          // m x m, measured only
  Eigen::MatrixXd nullspace_basis;  // m x n, orthonormal columns
  double beta = 0.995;
  Eigen::Index n = 0;
  Eigen::Index n_u = 0;
  std::int64_t step = 0;

  /// C = c0_scale I, basis = first n unit vectors (so theta starts at 0).
  static RtlsState initial(Eigen::Index n, Eigen::Index n_u, const RtlsConfig& config);
};

/// Discount-updates C with the measured sample, then runs power_iters shifted
/// solves against C with QR re-orthonormalization.
RtlsState rtls_step(RtlsState state, const TrajectorySample& sample, const RtlsConfig& config);

struct RtlsExtraction {
  Eigen::MatrixXd theta;
  /// False when the basis' Y block is singular or the tracked subspace is not
  /// separated from the rest of the spectrum (e.g. C proportional to I).
  bool identified = false;
};

/// The basis spans the row space of [-I, theta]: with basis = [V_y; V_z],
/// theta = -V_y^{-T} V_z^T.
RtlsExtraction rtls_extract(const RtlsState& state);

class RtlsEstimator : public Estimator {
 public:
  RtlsEstimator(Eigen::Index n, Eigen::Index n_u, RtlsConfig config);
  RtlsEstimator(RtlsState state, RtlsConfig config);

  std::string kind() const override { return "rtls"; }
  Eigen::Index n() const override { return state_.n; }
  Eigen::Index n_u() const override { return state_.n_u; }
  void step(const TrajectorySample& sample) override;
  Eigen::MatrixXd theta() const override;
  Eigen::MatrixXd correlation() const override { return state_.C_tilde; }
  /// Orthogonal projection of the measured triple onto null([-I, theta]).
  PointEstimate point_estimate(const TrajectorySample& sample) const override;
  nlohmann::json snapshot() const override;

  static RtlsEstimator from_snapshot(const nlohmann::json& j);

  const RtlsState& state() const { return state_; }
  bool identified() const;

 private:
  RtlsConfig config_;
  RtlsState state_;
};

// ---------------------------------------------------------------------------
// Exponentially weighted recursive least squares of x_{t+1} on (x_t, u_t)

struct RlsConfig {
  double beta = 0.995;
  /// Prior information delta * I.
  double delta = 1e-6;
  double jitter = 1e-12;

  void validate() const;
};

struct RlsState {
  Eigen::MatrixXd theta_hat;    // n x (n + n_u)
  Eigen::MatrixXd information;  // (n + n_u) x (n + n_u), symmetric PSD
  Eigen::MatrixXd correlation;  // m x m measured, kept for diagnostics
  double beta = 0.995;
  std::int64_t step = 0;

  static RlsState initial(Eigen::Index n, Eigen::Index n_u, const RlsConfig& config);
};

RlsState rls_step(RlsState state, const TrajectorySample& sample, const RlsConfig& config);

class RlsEstimator : public Estimator {
 public:
  RlsEstimator(Eigen::Index n, Eigen::Index n_u, RlsConfig config);
  RlsEstimator(RlsState state, RlsConfig config);

  std::string kind() const override { return "rls"; }
  Eigen::Index n() const override { return state_.theta_hat.rows(); }
  Eigen::Index n_u() const override { return state_.theta_hat.cols() - state_.theta_hat.rows(); }
  void step(const TrajectorySample& sample) override;
  Eigen::MatrixXd theta() const override { return state_.theta_hat; }
  Eigen::MatrixXd correlation() const override { return state_.correlation; }
  /// Keeps the measured regressor and predicts x_{t+1} from it.
  PointEstimate point_estimate(const TrajectorySample& sample) const override;
  nlohmann::json snapshot() const override;

  static RlsEstimator from_snapshot(const nlohmann::json& j);

  const RlsState& state() const { return state_; }

 private:
  RlsConfig config_;
  RlsState state_;
};

}  // namespace airls
