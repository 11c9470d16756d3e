#include "oracles.hpp"

#include <cmath>

namespace oracle {

Eigen::MatrixXd Rng::normal(Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = d(gen);
  return M;
}

Eigen::VectorXd Rng::positive(Eigen::Index size, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = std::exp(d(gen));
  return v;
}

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

Eigen::VectorXd weighted_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  const Eigen::VectorXd s = w.cwiseSqrt();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.asDiagonal() * X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(s.asDiagonal() * b);
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& X) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(X).pseudoInverse();
}

Eigen::VectorXd constrained_projection(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, const Eigen::VectorXd& w) {
  const Eigen::Index m = c.size();
  const Eigen::Index k = G.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + k, m + k);
  K.topLeftCorner(m, m) = w.asDiagonal();
  K.topRightCorner(m, k) = G.transpose();
  K.bottomLeftCorner(k, m) = G;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
  rhs.head(m) = w.asDiagonal() * c;
  return Eigen::FullPivLU<Eigen::MatrixXd>(K).solve(rhs).head(m);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      for (Eigen::Index p = 0; p < B.rows(); ++p)
        for (Eigen::Index q = 0; q < B.cols(); ++q) K(i * B.rows() + p, j * B.cols() + q) = A(i, j) * B(p, q);
  return K;
}

Eigen::MatrixXd joint_z(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& C, const std::vector<Eigen::VectorXd>& w) {
  const Eigen::Index q = theta.cols();
  const Eigen::Index m = C.rows();
  const Eigen::Index cols = C.cols();
  Eigen::MatrixXd H(m, q);
  H << theta, Eigen::MatrixXd::Identity(q, q);
  const Eigen::MatrixXd X = kron(Eigen::MatrixXd::Identity(cols, cols), H);
  Eigen::VectorXd b(m * cols);
  Eigen::VectorXd weights(m * cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    b.segment(i * m, m) = C.col(i);
    weights.segment(i * m, m) = w[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd z = weighted_ls(X, b, weights);
  return Eigen::Map<const Eigen::MatrixXd>(z.data(), q, cols);
}

Eigen::MatrixXd theta_ls(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Psi,
                         const Eigen::VectorXd& mu, const Eigen::VectorXd& v) {
  const Eigen::Index n = Y.rows();
  const Eigen::Index q = Z.rows();
  const Eigen::Index m = Z.cols();
  // vec(theta Z)_{(col j, row i)} = sum_k theta(i,k) Z(k,j); column-major theta.
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n * m + Psi.rows(), n * q);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < q; ++k) X(j * n + i, k * n + i) = Z(k, j);
  X.bottomRows(Psi.rows()) = Psi;
  Eigen::VectorXd b(n * m + Psi.rows());
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) b(j * n + i) = Y(i, j);
  b.tail(Psi.rows()) = mu;
  const Eigen::VectorXd t = weighted_ls(X, b, v);
  return Eigen::Map<const Eigen::MatrixXd>(t.data(), n, q);
}

double residual(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& C, const Eigen::MatrixXd& Psi,
                const Eigen::VectorXd& mu) {
  const Eigen::Index n = theta.rows();
  double r = 0.0;
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = -C(i, j);
      for (Eigen::Index k = 0; k < theta.cols(); ++k) e += theta(i, k) * C(n + k, j);
      r += e * e;
    }
  }
  for (Eigen::Index i = 0; i < Psi.rows(); ++i) {
    double e = -mu(i);
    for (Eigen::Index k = 0; k < theta.size(); ++k) e += Psi(i, k) * theta(k % n, k / n);
    r += e * e;
  }
  return r;
}

Eigen::MatrixXd batch_rls(const std::vector<airls::TrajectorySample>& trace, double beta, double delta) {
  const Eigen::Index n = trace.front().x.size();
  const Eigen::Index p = n + trace.front().u.size();
  const auto N = static_cast<double>(trace.size());
  Eigen::MatrixXd R = delta * std::pow(beta, N) * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, p);
  double w = 1.0;
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    Eigen::VectorXd phi(p);
    phi << it->x_noisy, it->u_noisy;
    R += w * phi * phi.transpose();
    S += w * it->x_next_noisy * phi.transpose();
    w *= beta;
  }
  return R.transpose().fullPivLu().solve(S.transpose()).transpose();
}

Eigen::MatrixXd tls_from_eig(const Eigen::MatrixXd& C, Eigen::Index n) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (C + C.transpose()));
  const Eigen::MatrixXd V = eig.eigenvectors().leftCols(n);
  const Eigen::MatrixXd Vy = V.topRows(n);
  const Eigen::MatrixXd Vz = V.bottomRows(V.rows() - n);
  return -(Vy.transpose().fullPivLu().solve(Vz.transpose()));
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace oracle
