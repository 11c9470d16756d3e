#pragma once

#include <Eigen/Dense>

#include "airls/system.hpp"

namespace airls {

/// Discounted correlation matrix of stacked (x_{t+1}, x_t, u_t) samples,
/// partitioned into a Y block (first n rows) and a Z block (last n + n_u
/// rows). Once estimates are substituted into the Z block the matrix is no
/// longer symmetric.
struct CorrelationState {
  Eigen::MatrixXd C;
  double beta = 0.995;
  Eigen::Index n = 0;
  Eigen::Index n_u = 0;

  /// C = scale * I_m.
  static CorrelationState initial(Eigen::Index n, Eigen::Index n_u, double beta, double scale = 1.0);

  Eigen::Index m() const { return 2 * n + n_u; }
  auto Y() const { return C.topRows(n); }
  auto Z() const { return C.bottomRows(n + n_u); }
};

/// v v^T with v = (x_{t+1}, x_t, u_t).
Eigen::MatrixXd build_gamma(const TrajectorySample& sample, bool use_noisy);

/// C <- beta C + gamma. beta may be anywhere in [0, 1] here.
CorrelationState discount_update(CorrelationState state, const Eigen::Ref<const Eigen::MatrixXd>& gamma);

/// Rank-one form of discount_update that skips materializing v v^T.
void discount_update_rank_one(CorrelationState& state, const Eigen::Ref<const Eigen::VectorXd>& v);

/// Keeps the Y rows and overwrites the Z rows with z_hat.
CorrelationState replace_z_block(CorrelationState state, const Eigen::Ref<const Eigen::MatrixXd>& z_hat);

}  // namespace airls
