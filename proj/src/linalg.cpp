#include "airls/linalg.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "airls/errors.hpp"

namespace airls {

WeightMatrix WeightMatrix::identity(Eigen::Index size) {
  return WeightMatrix{Eigen::VectorXd::Ones(size)};
}

WeightMatrix WeightMatrix::from_residual(const Eigen::Ref<const Eigen::VectorXd>& residual,
                                         double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("WeightMatrix: alpha must be positive");
  }
  return WeightMatrix{(residual.array().square() + alpha).rsqrt().matrix()};
}

WeightMatrix WeightMatrix::inverse() const { return WeightMatrix{diag.cwiseInverse()}; }

namespace {

void check_weights(const Eigen::Ref<const Eigen::MatrixXd>& X, const WeightMatrix& W) {
  if (W.size() != X.rows()) {
    throw DimensionMismatch("weighted_pseudo_inverse: weight size " + std::to_string(W.size()) +
                            " != row count " + std::to_string(X.rows()));
  }
  if (X.cols() > X.rows()) {
    throw SingularNormalMatrix("weighted_pseudo_inverse: more columns than rows");
  }
}

// Eigenvalues of a symmetric positive semidefinite matrix give its condition
// number directly; the matrices here are at most a few dozen wide.
void check_condition(const Eigen::MatrixXd& normal) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > kMaxNormalCondition || !std::isfinite(hi)) {
    throw SingularNormalMatrix("weighted_pseudo_inverse: normal matrix condition " +
                               std::to_string(lo > 0.0 ? hi / lo : INFINITY) + " exceeds limit");
  }
}

}  // namespace

Eigen::MatrixXd weighted_pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                        const WeightMatrix& W, LsMethod method) {
  check_weights(X, W);
  const Eigen::MatrixXd XtW = X.transpose() * W.diag.asDiagonal();
  const Eigen::MatrixXd normal = XtW * X;
  check_condition(normal);

  if (method == LsMethod::kQr) {
    // (W^{1/2} X)^+ W^{1/2}
    const Eigen::VectorXd sqrt_w = W.diag.cwiseSqrt();
    const Eigen::MatrixXd scaled = sqrt_w.asDiagonal() * X;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
    const Eigen::Index q = X.cols();
    const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), q);
    const Eigen::MatrixXd pinv =
        R.triangularView<Eigen::Upper>().solve(Q.transpose());
    return pinv * sqrt_w.asDiagonal();
  }
  return normal.ldlt().solve(XtW);
}

Eigen::VectorXd solve_weighted_ls(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& b,
                                  const WeightMatrix& W, LsMethod method) {
  if (b.size() != X.rows()) {
    throw DimensionMismatch("solve_weighted_ls: rhs size does not match rows of X");
  }
  check_weights(X, W);
  if (method == LsMethod::kQr) {
    return weighted_pseudo_inverse(X, W, method) * b;
  }
  const Eigen::MatrixXd XtW = X.transpose() * W.diag.asDiagonal();
  const Eigen::MatrixXd normal = XtW * X;
  check_condition(normal);
  return normal.ldlt().solve(XtW * b);
}

Eigen::MatrixXd constraint_matrix(const Eigen::Ref<const Eigen::MatrixXd>& theta) {
  const Eigen::Index n = theta.rows();
  Eigen::MatrixXd G(n, n + theta.cols());
  G.leftCols(n) = -Eigen::MatrixXd::Identity(n, n);
  G.rightCols(theta.cols()) = theta;
  return G;
}

ObliqueProjector make_projector(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                const WeightMatrix& W) {
  const Eigen::Index n = theta.rows();
  const Eigen::Index m = n + theta.cols();
  if (W.size() != m) {
    throw DimensionMismatch("make_projector: weight size must equal 2n + n_u");
  }
  const Eigen::MatrixXd G = constraint_matrix(theta);
  // G W^{-1} G^T = W_y^{-1} + theta W_z^{-1} theta^T is positive definite for
  // any strictly positive W, so no conditioning check is needed.
  const Eigen::VectorXd w_inv = W.diag.cwiseInverse();
  const Eigen::MatrixXd GWinv = G * w_inv.asDiagonal();
  const Eigen::MatrixXd normal = GWinv * G.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  assert(llt.info() == Eigen::Success);
  // (G^T)^dagger_{W^{-1}} = (G W^{-1} G^T)^{-1} G W^{-1}
  const Eigen::MatrixXd pinv = llt.solve(GWinv);
  ObliqueProjector P;
  P.matrix = Eigen::MatrixXd::Identity(m, m) - pinv.transpose() * G;
  return P;
}

}  // namespace airls
