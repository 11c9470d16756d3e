#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "airls/correlation.hpp"
#include "airls/estimator.hpp"
#include "airls/linalg.hpp"
#include "airls/system.hpp"

namespace airls {

/// Prior term ||Psi vec(theta) - mu||_1 on the parameters. Zero rows means
/// no regularization.
struct Regularization {
  Eigen::MatrixXd Psi;
  Eigen::VectorXd mu;

  static Regularization none(Eigen::Index n, Eigen::Index n_u);
  /// Psi = scale * I, mu = 0; scale == 0 gives none().
  static Regularization scaled_identity(Eigen::Index n, Eigen::Index n_u, double scale);

  Eigen::Index rows() const { return Psi.rows(); }
  void validate(Eigen::Index n, Eigen::Index n_u) const;
};

struct EstimatorConfig {
  double beta = 0.995;
  /// IRLS stabilizer in w = (r^2 + alpha)^{-1/2}.
  double alpha = 1e-8;
  int K = 1;
  int L_Z = 1;
  int L_Theta = 1;
  /// On a singular parameter solve, retry with ridge_eps * I rows appended.
  bool ridge_fallback = true;
  double ridge_eps = 1e-6;
  /// Initial correlation matrix is c0_scale * I_m.
  double c0_scale = 1.0;
  /// Reweighting passes for per-sample state/input reconstruction.
  int point_iters = 2;
  /// Initial [A, B]; zero when unset.
  std::optional<Eigen::MatrixXd> theta0;

  void validate() const;
};

struct EstimatorState {
  Eigen::MatrixXd theta_hat;  // n x (n + n_u)
  Eigen::MatrixXd z_hat;      // (n + n_u) x m
  CorrelationState corr;
  double last_residual_sq = 0.0;
  std::int64_t step = 0;

  static EstimatorState initial(Eigen::Index n, Eigen::Index n_u, const EstimatorConfig& config);
};

// ---------------------------------------------------------------------------
// State (Z) update

/// IRLS weights for one column of the state update:
/// r = (theta z_prev - y_col, z_prev - z_col), w_j = (r_j^2 + alpha)^{-1/2}.
WeightMatrix state_weights(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                           const Eigen::Ref<const Eigen::VectorXd>& z_prev_col,
                           const Eigen::Ref<const Eigen::VectorXd>& c_col, double alpha);

/// argmin_z ||[theta; I] z - c_col||_W^2, computed as E_z P c_col.
Eigen::VectorXd update_z_column(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                                const Eigen::Ref<const Eigen::VectorXd>& c_col, const WeightMatrix& W);

/// One reweighted pass over all m columns of C; columns are independent.
Eigen::MatrixXd update_z(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                         const Eigen::Ref<const Eigen::MatrixXd>& z_prev, const CorrelationState& corr,
                         double alpha);

// ---------------------------------------------------------------------------
// Parameter (theta) update

/// Z_hat^T kron I_n, the (n m) x (n (n + n_u)) regressor of vec(theta Z_hat).
Eigen::MatrixXd vectorized_regressor(const Eigen::Ref<const Eigen::MatrixXd>& z_hat, Eigen::Index n);

/// Column-major vec().
Eigen::VectorXd vec(const Eigen::Ref<const Eigen::MatrixXd>& M);

WeightMatrix param_weights(const Eigen::Ref<const Eigen::MatrixXd>& theta_prev,
                           const Eigen::Ref<const Eigen::MatrixXd>& z_hat,
                           const Eigen::Ref<const Eigen::MatrixXd>& y_block, const Regularization& reg,
                           double alpha);

/// Weighted LS solve of [Z_hat^T kron I; Psi] theta = [vec(Y); mu].
/// Throws SingularNormalMatrix unless ridge_fallback is set.
Eigen::MatrixXd update_theta(const Eigen::Ref<const Eigen::MatrixXd>& z_hat,
                             const Eigen::Ref<const Eigen::MatrixXd>& y_block, const Regularization& reg,
                             const WeightMatrix& V, bool ridge_fallback = false, double ridge_eps = 1e-6);

// ---------------------------------------------------------------------------

/// One time step: discount in the measured sample, K alternations of L_Z
/// state passes and L_Theta parameter passes, then write Z_hat back into C.
EstimatorState airls_step(EstimatorState state, const TrajectorySample& sample, const EstimatorConfig& config,
                          const Regularization& reg);

/// Projects the measured triple of `sample` onto null([-I, theta]) with
/// single-sample IRLS weights, starting from the raw measurement.
PointEstimate point_estimate(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat, const TrajectorySample& sample,
                             double alpha, int inner_iters);

/// ||R||^2 with R = (vec([-I, theta] C), Psi vec(theta) - mu).
double residual(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat, const CorrelationState& corr,
                const Regularization& reg);
double residual(const EstimatorState& state, const Regularization& reg);

/// 1 - beta <= (gamma_min / gamma_max)^2, the sufficient condition for the
/// residual to be non-increasing. Throws InvalidBounds if gamma_min > gamma_max.
bool check_beta_bound(double gamma_max, double gamma_min, double beta);

class AirlsEstimator : public Estimator {
 public:
  AirlsEstimator(Eigen::Index n, Eigen::Index n_u, EstimatorConfig config, Regularization reg);
  AirlsEstimator(EstimatorState state, EstimatorConfig config, Regularization reg);

  std::string kind() const override { return "airls"; }
  Eigen::Index n() const override { return n_; }
  Eigen::Index n_u() const override { return n_u_; }
  void step(const TrajectorySample& sample) override;
  Eigen::MatrixXd theta() const override { return state_.theta_hat; }
  Eigen::MatrixXd correlation() const override { return state_.corr.C; }
  PointEstimate point_estimate(const TrajectorySample& sample) const override;
  nlohmann::json snapshot() const override;

  static AirlsEstimator from_snapshot(const nlohmann::json& j);

  const EstimatorState& state() const { return state_; }
  const EstimatorConfig& config() const { return config_; }
  const Regularization& regularization() const { return reg_; }
  double residual_sq() const { return state_.last_residual_sq; }

 private:
  Eigen::Index n_;
  Eigen::Index n_u_;
  EstimatorConfig config_;
  Regularization reg_;
  EstimatorState state_;
};

}  // namespace airls
