#pragma once

#include <Eigen/Dense>

namespace airls {

/// Condition number of X^T W X above which weighted solves refuse to proceed.
inline constexpr double kMaxNormalCondition = 1e12;

/// Diagonal weight matrix, stored as its diagonal. Entries are strictly
/// positive; IRLS weights built by from_residual are additionally bounded by
/// alpha^{-1/2}.
struct WeightMatrix {
  Eigen::VectorXd diag;

  static WeightMatrix identity(Eigen::Index size);

  /// w_j = (r_j^2 + alpha)^{-1/2}
  static WeightMatrix from_residual(const Eigen::Ref<const Eigen::VectorXd>& residual,
                                    double alpha);

  Eigen::Index size() const { return diag.size(); }
  WeightMatrix inverse() const;
};

enum class LsMethod {
  kNormalEquations,  // (X^T W X)^{-1} X^T W, as written
  kQr,               // QR of W^{1/2} X, same contract
};

/// X^dagger_W = (X^T W X)^{-1} X^T W.
///
/// Throws SingularNormalMatrix when cond(X^T W X) exceeds kMaxNormalCondition
/// and DimensionMismatch when W does not have one entry per row of X.
Eigen::MatrixXd weighted_pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                        const WeightMatrix& W,
                                        LsMethod method = LsMethod::kNormalEquations);

/// argmin_z ||X z - b||_W^2 with ||v||_W^2 = v^T W v.
Eigen::VectorXd solve_weighted_ls(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& b,
                                  const WeightMatrix& W,
                                  LsMethod method = LsMethod::kNormalEquations);

/// Oblique projector onto null([-I_n, theta]) that is closest in the W-norm:
/// P c = argmin_d ||d - c||_W^2  s.t.  [-I_n, theta] d = 0.
struct ObliqueProjector {
  Eigen::MatrixXd matrix;

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const { return matrix * v; }
};

/// The constraint matrix [-I_n, theta].
Eigen::MatrixXd constraint_matrix(const Eigen::Ref<const Eigen::MatrixXd>& theta);

/// P = I_m - ((G^T)^dagger_{W^{-1}})^T G with G = [-I_n, theta].
///
/// The pseudo-inverse is taken with the inverse weights so that P minimizes
/// the W-weighted distance (the form that agrees with the weighted
/// least-squares state update). With W = I both forms coincide.
ObliqueProjector make_projector(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                const WeightMatrix& W);

}  // namespace airls
