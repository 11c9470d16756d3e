#include "airls/correlation.hpp"

#include <stdexcept>

#include "airls/errors.hpp"

namespace airls {

CorrelationState CorrelationState::initial(Eigen::Index n, Eigen::Index n_u, double beta, double scale) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("CorrelationState: beta must lie in (0, 1)");
  }
  CorrelationState s;
  s.n = n;
  s.n_u = n_u;
  s.beta = beta;
  s.C = scale * Eigen::MatrixXd::Identity(s.m(), s.m());
  return s;
}

Eigen::MatrixXd build_gamma(const TrajectorySample& sample, bool use_noisy) {
  const auto& xn = use_noisy ? sample.x_next_noisy : sample.x_next;
  const auto& x = use_noisy ? sample.x_noisy : sample.x;
  if (xn.size() != x.size()) {
    throw DimensionMismatch("build_gamma: x_next and x sizes differ");
  }
  const Eigen::VectorXd v = sample.stacked(use_noisy);
  return v * v.transpose();
}

CorrelationState discount_update(CorrelationState state, const Eigen::Ref<const Eigen::MatrixXd>& gamma) {
  if (gamma.rows() != state.C.rows() || gamma.cols() != state.C.cols()) {
    throw DimensionMismatch("discount_update: gamma shape does not match C");
  }
  if (!(state.beta >= 0.0 && state.beta <= 1.0)) {
    throw std::invalid_argument("discount_update: beta must lie in [0, 1]");
  }
  state.C = state.beta * state.C + gamma;
  return state;
}

void discount_update_rank_one(CorrelationState& state, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != state.C.rows()) {
    throw DimensionMismatch("discount_update: sample length does not match C");
  }
  state.C *= state.beta;
  state.C.noalias() += v * v.transpose();
}

CorrelationState replace_z_block(CorrelationState state, const Eigen::Ref<const Eigen::MatrixXd>& z_hat) {
  if (z_hat.rows() != state.n + state.n_u || z_hat.cols() != state.m()) {
    throw DimensionMismatch("replace_z_block: z_hat must be (n + n_u) x m");
  }
  state.C.bottomRows(state.n + state.n_u) = z_hat;
  return state;
}

}  // namespace airls
