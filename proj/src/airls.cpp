#include "airls/airls.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "airls/errors.hpp"

namespace airls {

Regularization Regularization::none(Eigen::Index n, Eigen::Index n_u) {
  return Regularization{Eigen::MatrixXd(0, n * (n + n_u)), Eigen::VectorXd(0)};
}

Regularization Regularization::scaled_identity(Eigen::Index n, Eigen::Index n_u, double scale) {
  if (scale == 0.0) {
    return none(n, n_u);
  }
  const Eigen::Index p = n * (n + n_u);
  return Regularization{scale * Eigen::MatrixXd::Identity(p, p), Eigen::VectorXd::Zero(p)};
}

void Regularization::validate(Eigen::Index n, Eigen::Index n_u) const {
  if (Psi.cols() != n * (n + n_u)) {
    throw DimensionMismatch("Regularization: Psi must have n (n + n_u) columns");
  }
  if (mu.size() != Psi.rows()) {
    throw DimensionMismatch("Regularization: mu must have one entry per row of Psi");
  }
}

void EstimatorConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("EstimatorConfig: beta must lie in (0, 1)");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("EstimatorConfig: alpha must be positive");
  }
  if (K < 1 || L_Z < 1 || L_Theta < 1) {
    throw std::invalid_argument("EstimatorConfig: K, L_Z and L_Theta must be at least 1");
  }
  if (!(c0_scale > 0.0)) {
    throw std::invalid_argument("EstimatorConfig: c0_scale must be positive");
  }
  if (point_iters < 1) {
    throw std::invalid_argument("EstimatorConfig: point_iters must be at least 1");
  }
}

EstimatorState EstimatorState::initial(Eigen::Index n, Eigen::Index n_u, const EstimatorConfig& config) {
  config.validate();
  EstimatorState s;
  s.corr = CorrelationState::initial(n, n_u, config.beta, config.c0_scale);
  if (config.theta0) {
    if (config.theta0->rows() != n || config.theta0->cols() != n + n_u) {
      throw DimensionMismatch("EstimatorConfig: theta0 must be n x (n + n_u)");
    }
    s.theta_hat = *config.theta0;
  } else {
    s.theta_hat = Eigen::MatrixXd::Zero(n, n + n_u);
  }
  s.z_hat = s.corr.Z();
  s.step = 0;
  s.last_residual_sq = residual(s.theta_hat, s.corr, Regularization::none(n, n_u));
  return s;
}

WeightMatrix state_weights(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                           const Eigen::Ref<const Eigen::VectorXd>& z_prev_col,
                           const Eigen::Ref<const Eigen::VectorXd>& c_col, double alpha) {
  const Eigen::Index n = theta_hat.rows();
  const Eigen::Index p = theta_hat.cols();
  if (z_prev_col.size() != p || c_col.size() != n + p) {
    throw DimensionMismatch("state_weights: column sizes do not match theta");
  }
  Eigen::VectorXd r(n + p);
  r.head(n) = theta_hat * z_prev_col - c_col.head(n);
  r.tail(p) = z_prev_col - c_col.tail(p);
  return WeightMatrix::from_residual(r, alpha);
}

Eigen::VectorXd update_z_column(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                                const Eigen::Ref<const Eigen::VectorXd>& c_col, const WeightMatrix& W) {
  const Eigen::Index n = theta_hat.rows();
  if (c_col.size() != n + theta_hat.cols()) {
    throw DimensionMismatch("update_z_column: column size must equal 2n + n_u");
  }
  const ObliqueProjector P = make_projector(theta_hat, W);
  return (P.matrix.bottomRows(theta_hat.cols()) * c_col);
}

Eigen::MatrixXd update_z(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat,
                         const Eigen::Ref<const Eigen::MatrixXd>& z_prev, const CorrelationState& corr,
                         double alpha) {
  const Eigen::Index m = corr.m();
  if (z_prev.rows() != corr.n + corr.n_u || z_prev.cols() != m) {
    throw DimensionMismatch("update_z: z_prev must be (n + n_u) x m");
  }
  Eigen::MatrixXd out(z_prev.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const WeightMatrix W = state_weights(theta_hat, z_prev.col(i), corr.C.col(i), alpha);
    out.col(i) = update_z_column(theta_hat, corr.C.col(i), W);
  }
  return out;
}

Eigen::VectorXd vec(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  Eigen::VectorXd v(M.size());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      v(k++) = M(i, j);
    }
  }
  return v;
}

Eigen::MatrixXd vectorized_regressor(const Eigen::Ref<const Eigen::MatrixXd>& z_hat, Eigen::Index n) {
  const Eigen::Index p = z_hat.rows();
  const Eigen::Index m = z_hat.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * n, p * n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double z = z_hat(j, i);
      for (Eigen::Index k = 0; k < n; ++k) {
        out(i * n + k, j * n + k) = z;
      }
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd unvec(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      M(i, j) = v(k++);
    }
  }
  return M;
}

}  // namespace

WeightMatrix param_weights(const Eigen::Ref<const Eigen::MatrixXd>& theta_prev,
                           const Eigen::Ref<const Eigen::MatrixXd>& z_hat,
                           const Eigen::Ref<const Eigen::MatrixXd>& y_block, const Regularization& reg,
                           double alpha) {
  const Eigen::Index n = theta_prev.rows();
  if (z_hat.rows() != theta_prev.cols() || y_block.rows() != n || y_block.cols() != z_hat.cols()) {
    throw DimensionMismatch("param_weights: theta, z_hat and y_block shapes disagree");
  }
  reg.validate(n, theta_prev.cols() - n);
  const Eigen::Index data_rows = y_block.size();
  Eigen::VectorXd r(data_rows + reg.rows());
  r.head(data_rows) = vec(theta_prev * z_hat - y_block);
  if (reg.rows() > 0) {
    r.tail(reg.rows()) = reg.Psi * vec(theta_prev) - reg.mu;
  }
  return WeightMatrix::from_residual(r, alpha);
}

Eigen::MatrixXd update_theta(const Eigen::Ref<const Eigen::MatrixXd>& z_hat,
                             const Eigen::Ref<const Eigen::MatrixXd>& y_block, const Regularization& reg,
                             const WeightMatrix& V, bool ridge_fallback, double ridge_eps) {
  const Eigen::Index n = y_block.rows();
  const Eigen::Index p = z_hat.rows();
  if (y_block.cols() != z_hat.cols()) {
    throw DimensionMismatch("update_theta: y_block and z_hat must have the same column count");
  }
  reg.validate(n, p - n);
  const Eigen::Index data_rows = y_block.size();
  const Eigen::Index rows = data_rows + reg.rows();
  if (V.size() != rows) {
    throw DimensionMismatch("update_theta: weight size must equal n m + M");
  }

  Eigen::MatrixXd X(rows, n * p);
  Eigen::VectorXd b(rows);
  X.topRows(data_rows) = vectorized_regressor(z_hat, n);
  b.head(data_rows) = vec(y_block);
  if (reg.rows() > 0) {
    X.bottomRows(reg.rows()) = reg.Psi;
    b.tail(reg.rows()) = reg.mu;
  }

  try {
    return unvec(solve_weighted_ls(X, b, V), n, p);
  } catch (const SingularNormalMatrix&) {
    if (!ridge_fallback) {
      throw;
    }
  }
  const Eigen::Index q = n * p;
  Eigen::MatrixXd Xr(rows + q, q);
  Xr << X, ridge_eps * Eigen::MatrixXd::Identity(q, q);
  Eigen::VectorXd br(rows + q);
  br << b, Eigen::VectorXd::Zero(q);
  WeightMatrix Vr{Eigen::VectorXd(rows + q)};
  Vr.diag << V.diag, Eigen::VectorXd::Ones(q);
  return unvec(solve_weighted_ls(Xr, br, Vr, LsMethod::kQr), n, p);
}

EstimatorState airls_step(EstimatorState state, const TrajectorySample& sample, const EstimatorConfig& config,
                          const Regularization& reg) {
  const Eigen::Index n = state.corr.n;
  const Eigen::VectorXd v = sample.stacked(true);
  if (v.size() != state.corr.m()) {
    throw DimensionMismatch("airls_step: sample dimension does not match the estimator");
  }
  discount_update_rank_one(state.corr, v);

  const auto y_block = state.corr.C.topRows(n);
  for (int k = 0; k < config.K; ++k) {
    for (int l = 0; l < config.L_Z; ++l) {
      state.z_hat = update_z(state.theta_hat, state.z_hat, state.corr, config.alpha);
    }
    for (int l = 0; l < config.L_Theta; ++l) {
      const WeightMatrix V = param_weights(state.theta_hat, state.z_hat, y_block, reg, config.alpha);
      state.theta_hat =
          update_theta(state.z_hat, y_block, reg, V, config.ridge_fallback, config.ridge_eps);
    }
  }

  state.corr.C.bottomRows(state.z_hat.rows()) = state.z_hat;
  state.last_residual_sq = residual(state.theta_hat, state.corr, reg);
  ++state.step;
  return state;
}

PointEstimate point_estimate(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat, const TrajectorySample& sample,
                             double alpha, int inner_iters) {
  const Eigen::Index n = theta_hat.rows();
  const Eigen::Index p = theta_hat.cols();
  const Eigen::VectorXd c = sample.stacked(true);
  if (c.size() != n + p) {
    throw DimensionMismatch("point_estimate: sample dimension does not match theta");
  }
  Eigen::VectorXd z = c.tail(p);
  Eigen::VectorXd d = c;
  for (int it = 0; it < inner_iters; ++it) {
    const WeightMatrix W = state_weights(theta_hat, z, c, alpha);
    d = make_projector(theta_hat, W).apply(c);
    z = d.tail(p);
  }
  PointEstimate est;
  est.x_next_hat = d.head(n);
  est.x_hat = d.segment(n, n);
  est.u_hat = d.tail(p - n);
  return est;
}

double residual(const Eigen::Ref<const Eigen::MatrixXd>& theta_hat, const CorrelationState& corr,
                const Regularization& reg) {
  const Eigen::MatrixXd data = constraint_matrix(theta_hat) * corr.C;
  double total = data.squaredNorm();
  if (reg.rows() > 0) {
    total += (reg.Psi * vec(theta_hat) - reg.mu).squaredNorm();
  }
  return total;
}

double residual(const EstimatorState& state, const Regularization& reg) {
  return residual(state.theta_hat, state.corr, reg);
}

bool check_beta_bound(double gamma_max, double gamma_min, double beta) {
  if (!(gamma_min > 0.0) || gamma_min > gamma_max) {
    throw InvalidBounds("check_beta_bound: need gamma_max >= gamma_min > 0");
  }
  const double ratio = gamma_min / gamma_max;
  return 1.0 - beta <= ratio * ratio;
}

AirlsEstimator::AirlsEstimator(Eigen::Index n, Eigen::Index n_u, EstimatorConfig config, Regularization reg)
    : n_(n), n_u_(n_u), config_(std::move(config)), reg_(std::move(reg)) {
  reg_.validate(n_, n_u_);
  state_ = EstimatorState::initial(n_, n_u_, config_);
  state_.last_residual_sq = residual(state_, reg_);
}

AirlsEstimator::AirlsEstimator(EstimatorState state, EstimatorConfig config, Regularization reg)
    : n_(state.corr.n), n_u_(state.corr.n_u), config_(std::move(config)), reg_(std::move(reg)),
      state_(std::move(state)) {
  config_.validate();
  reg_.validate(n_, n_u_);
}

void AirlsEstimator::step(const TrajectorySample& sample) {
  state_ = airls_step(std::move(state_), sample, config_, reg_);
}

PointEstimate AirlsEstimator::point_estimate(const TrajectorySample& sample) const {
  return airls::point_estimate(state_.theta_hat, sample, config_.alpha, config_.point_iters);
}

}  // namespace airls
