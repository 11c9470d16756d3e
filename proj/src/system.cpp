#include "airls/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "airls/errors.hpp"

namespace airls {

LinearSystem::LinearSystem(Eigen::MatrixXd a, Eigen::MatrixXd b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("LinearSystem: A must be square");
  }
  if (B.rows() != A.rows()) {
    throw DimensionMismatch("LinearSystem: B must have as many rows as A");
  }
}

Eigen::MatrixXd LinearSystem::theta() const {
  Eigen::MatrixXd out(n(), n() + n_u());
  out << A, B;
  return out;
}

LinearSystem LinearSystem::benchmark() {
  Eigen::MatrixXd A(2, 2);
  A << 0.8, -0.25, -0.25, 0.25;
  Eigen::MatrixXd B(2, 2);
  B << 10.0, 2.0, 2.0, 10.0;
  return LinearSystem(A, B);
}

void NoiseConfig::validate() const {
  if (!enabled) {
    return;
  }
  if (!(snr > 0.0)) {
    throw std::invalid_argument("NoiseConfig: snr must be positive");
  }
  if (!(outlier_ratio >= 0.0 && outlier_ratio <= 1.0)) {
    throw std::invalid_argument("NoiseConfig: outlier_ratio must lie in [0, 1]");
  }
  if (!(outlier_low < outlier_high)) {
    throw std::invalid_argument("NoiseConfig: outlier_low must be below outlier_high");
  }
}

Eigen::VectorXd TrajectorySample::stacked(bool noisy) const {
  const auto& xn = noisy ? x_next_noisy : x_next;
  const auto& xc = noisy ? x_noisy : x;
  const auto& uc = noisy ? u_noisy : u;
  Eigen::VectorXd v(xn.size() + xc.size() + uc.size());
  v << xn, xc, uc;
  return v;
}

Eigen::VectorXd simulate_step(const LinearSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (x.size() != sys.n() || u.size() != sys.n_u()) {
    throw DimensionMismatch("simulate_step: state or input size does not match the system");
  }
  return sys.A * x + sys.B * u;
}

std::vector<TrajectorySample> generate_trajectory(const LinearSystem& sys,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x0,
                                                  double input_std, std::int64_t N,
                                                  const NoiseConfig& noise) {
  if (N < 1) {
    throw std::invalid_argument("generate_trajectory: N must be at least 1");
  }
  if (!(input_std > 0.0)) {
    throw std::invalid_argument("generate_trajectory: input_std must be positive");
  }
  if (x0.size() != sys.n()) {
    throw DimensionMismatch("generate_trajectory: x0 size does not match the system");
  }
  noise.validate();

  const Eigen::Index n = sys.n();
  const Eigen::Index nu = sys.n_u();
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Columns are time instants: states x_0..x_N, inputs u_0..u_{N-1}.
  Eigen::MatrixXd X(n, N + 1);
  Eigen::MatrixXd U(nu, N);
  X.col(0) = x0;
  for (std::int64_t t = 0; t < N; ++t) {
    for (Eigen::Index j = 0; j < nu; ++j) {
      U(j, t) = input_std * gauss(rng);
    }
    X.col(t + 1) = simulate_step(sys, X.col(t), U.col(t));
  }

  Eigen::MatrixXd Xm = X;
  Eigen::MatrixXd Um = U;
  std::vector<bool> outlier(static_cast<std::size_t>(N), false);
  if (noise.enabled) {
    const Eigen::VectorXd x_std =
        (X.array().square().rowwise().mean() / noise.snr).sqrt().matrix();
    const Eigen::VectorXd u_std =
        (U.array().square().rowwise().mean() / noise.snr).sqrt().matrix();
    for (std::int64_t t = 0; t <= N; ++t) {
      for (Eigen::Index j = 0; j < n; ++j) {
        Xm(j, t) += x_std(j) * gauss(rng);
      }
    }
    for (std::int64_t t = 0; t < N; ++t) {
      for (Eigen::Index j = 0; j < nu; ++j) {
        Um(j, t) += u_std(j) * gauss(rng);
      }
    }

    const auto count = static_cast<std::int64_t>(std::llround(noise.outlier_ratio * static_cast<double>(N)));
    std::vector<std::int64_t> index(static_cast<std::size_t>(N));
    std::iota(index.begin(), index.end(), 0);
    // Partial Fisher-Yates: the first `count` entries are a uniform draw
    // without replacement.
    for (std::int64_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::int64_t> pick(i, N - 1);
      std::swap(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(pick(rng))]);
      outlier[static_cast<std::size_t>(index[static_cast<std::size_t>(i)])] = true;
    }
  }

  std::uniform_real_distribution<double> spike(noise.outlier_low, noise.outlier_high);
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(N));
  for (std::int64_t t = 0; t < N; ++t) {
    TrajectorySample s;
    s.t = t;
    s.x_next = X.col(t + 1);
    s.x = X.col(t);
    s.u = U.col(t);
    s.x_next_noisy = Xm.col(t + 1);
    s.x_noisy = Xm.col(t);
    s.u_noisy = Um.col(t);
    s.is_outlier = outlier[static_cast<std::size_t>(t)];
    if (s.is_outlier) {
      for (Eigen::Index j = 0; j < n; ++j) s.x_next_noisy(j) += spike(rng);
      for (Eigen::Index j = 0; j < n; ++j) s.x_noisy(j) += spike(rng);
      for (Eigen::Index j = 0; j < nu; ++j) s.u_noisy(j) += spike(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace airls
