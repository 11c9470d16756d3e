#include "airls/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "airls/correlation.hpp"
#include "airls/errors.hpp"
#include "airls/linalg.hpp"

namespace airls {

namespace {

// Relative separation required between the tracked eigenvalues and the mean
// of the remaining spectrum before the basis counts as identified.
constexpr double kGapTolerance = 1e-6;
// Reciprocal condition of V_y below which the extraction is unreliable.
constexpr double kMinYBlockRcond = 1e-10;

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& V) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
  return qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), V.cols());
}

}  // namespace

void RtlsConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("RtlsConfig: beta must lie in (0, 1)");
  }
  if (power_iters < 1) {
    throw std::invalid_argument("RtlsConfig: power_iters must be at least 1");
  }
  if (!(c0_scale > 0.0) || !(jitter > 0.0)) {
    throw std::invalid_argument("RtlsConfig: c0_scale and jitter must be positive");
  }
}

RtlsState RtlsState::initial(Eigen::Index n, Eigen::Index n_u, const RtlsConfig& config) {
  config.validate();
  RtlsState s;
  s.n = n;
  s.n_u = n_u;
  s.beta = config.beta;
  const Eigen::Index m = 2 * n + n_u;
  s.C_tilde = config.c0_scale * Eigen::MatrixXd::Identity(m, m);
  s.nullspace_basis = Eigen::MatrixXd::Identity(m, n);
  return s;
}

RtlsState rtls_step(RtlsState state, const TrajectorySample& sample, const RtlsConfig& config) {
  const Eigen::VectorXd v = sample.stacked(true);
  const Eigen::Index m = state.C_tilde.rows();
  if (v.size() != m) {
    throw DimensionMismatch("rtls_step: sample dimension does not match the estimator");
  }
  state.C_tilde *= state.beta;
  state.C_tilde.noalias() += v * v.transpose();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(state.C_tilde);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1.0 / kMaxNormalCondition)) {
    const double scale = std::max(state.C_tilde.trace() / static_cast<double>(m), 1.0);
    ldlt.compute(state.C_tilde + config.jitter * scale * Eigen::MatrixXd::Identity(m, m));
    if (ldlt.info() != Eigen::Success) {
      throw SingularMatrix("rtls_step: correlation matrix not invertible after jitter");
    }
  }
  for (int it = 0; it < config.power_iters; ++it) {
    state.nullspace_basis = orthonormalize(ldlt.solve(state.nullspace_basis));
  }
  ++state.step;
  return state;
}

RtlsExtraction rtls_extract(const RtlsState& state) {
  const Eigen::Index n = state.n;
  const Eigen::MatrixXd& V = state.nullspace_basis;
  const Eigen::MatrixXd Vy = V.topRows(n);
  const Eigen::MatrixXd Vz = V.bottomRows(V.rows() - n);

  RtlsExtraction out;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Vy.transpose());
  if (!lu.isInvertible() || lu.rcond() < kMinYBlockRcond) {
    out.theta = Eigen::MatrixXd::Zero(n, V.rows() - n);
    out.identified = false;
    return out;
  }
  out.theta = -lu.solve(Vz.transpose());

  // Rayleigh quotients of the tracked subspace against the rest of the
  // spectrum; equal values mean no preferred null space.
  const Eigen::MatrixXd sym = 0.5 * (state.C_tilde + state.C_tilde.transpose());
  const Eigen::MatrixXd rq = V.transpose() * sym * V;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rq, Eigen::EigenvaluesOnly);
  const double tracked_max = eig.eigenvalues().maxCoeff();
  const double rest = V.rows() > n ? (sym.trace() - rq.trace()) / static_cast<double>(V.rows() - n) : 0.0;
  out.identified = tracked_max < (1.0 - kGapTolerance) * rest;
  return out;
}

RtlsEstimator::RtlsEstimator(Eigen::Index n, Eigen::Index n_u, RtlsConfig config)
    : config_(std::move(config)), state_(RtlsState::initial(n, n_u, config_)) {}

RtlsEstimator::RtlsEstimator(RtlsState state, RtlsConfig config)
    : config_(std::move(config)), state_(std::move(state)) {
  config_.validate();
}

void RtlsEstimator::step(const TrajectorySample& sample) {
  state_ = rtls_step(std::move(state_), sample, config_);
}

Eigen::MatrixXd RtlsEstimator::theta() const { return rtls_extract(state_).theta; }

bool RtlsEstimator::identified() const { return rtls_extract(state_).identified; }

PointEstimate RtlsEstimator::point_estimate(const TrajectorySample& sample) const {
  const Eigen::MatrixXd th = theta();
  const Eigen::Index n = state_.n;
  const Eigen::VectorXd d =
      make_projector(th, WeightMatrix::identity(state_.C_tilde.rows())).apply(sample.stacked(true));
  PointEstimate est;
  est.x_next_hat = d.head(n);
  est.x_hat = d.segment(n, n);
  est.u_hat = d.tail(state_.n_u);
  return est;
}

void RlsConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("RlsConfig: beta must lie in (0, 1]");
  }
  if (!(delta > 0.0) || !(jitter > 0.0)) {
    throw std::invalid_argument("RlsConfig: delta and jitter must be positive");
  }
}

RlsState RlsState::initial(Eigen::Index n, Eigen::Index n_u, const RlsConfig& config) {
  config.validate();
  RlsState s;
  s.theta_hat = Eigen::MatrixXd::Zero(n, n + n_u);
  s.information = config.delta * Eigen::MatrixXd::Identity(n + n_u, n + n_u);
  s.correlation = Eigen::MatrixXd::Zero(2 * n + n_u, 2 * n + n_u);
  s.beta = config.beta;
  return s;
}

RlsState rls_step(RlsState state, const TrajectorySample& sample, const RlsConfig& config) {
  const Eigen::Index n = state.theta_hat.rows();
  const Eigen::Index p = state.theta_hat.cols();
  if (sample.x_next_noisy.size() != n || sample.x_noisy.size() + sample.u_noisy.size() != p) {
    throw DimensionMismatch("rls_step: sample dimension does not match the estimator");
  }
  Eigen::VectorXd phi(p);
  phi << sample.x_noisy, sample.u_noisy;
  const Eigen::VectorXd& y = sample.x_next_noisy;

  state.information *= state.beta;
  state.information.noalias() += phi * phi.transpose();
  const Eigen::VectorXd v = sample.stacked(true);
  state.correlation *= state.beta;
  state.correlation.noalias() += v * v.transpose();

  // theta += e phi^T R^{-1}
  Eigen::LDLT<Eigen::MatrixXd> ldlt(state.information);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1.0 / kMaxNormalCondition)) {
    const double scale = std::max(state.information.trace() / static_cast<double>(p), 1.0);
    ldlt.compute(state.information + config.jitter * scale * Eigen::MatrixXd::Identity(p, p));
  }
  const Eigen::VectorXd gain = ldlt.solve(phi);
  const Eigen::VectorXd err = y - state.theta_hat * phi;
  state.theta_hat.noalias() += err * gain.transpose();
  ++state.step;
  return state;
}

RlsEstimator::RlsEstimator(Eigen::Index n, Eigen::Index n_u, RlsConfig config)
    : config_(std::move(config)), state_(RlsState::initial(n, n_u, config_)) {}

RlsEstimator::RlsEstimator(RlsState state, RlsConfig config)
    : config_(std::move(config)), state_(std::move(state)) {
  config_.validate();
}

void RlsEstimator::step(const TrajectorySample& sample) {
  state_ = rls_step(std::move(state_), sample, config_);
}

PointEstimate RlsEstimator::point_estimate(const TrajectorySample& sample) const {
  PointEstimate est;
  est.x_hat = sample.x_noisy;
  est.u_hat = sample.u_noisy;
  Eigen::VectorXd phi(est.x_hat.size() + est.u_hat.size());
  phi << est.x_hat, est.u_hat;
  est.x_next_hat = state_.theta_hat * phi;
  return est;
}

}  // namespace airls
