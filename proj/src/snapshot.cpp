#include <string>

#include "airls/airls.hpp"
#include "airls/baselines.hpp"
#include "airls/errors.hpp"
#include "airls/estimator.hpp"

namespace airls {

namespace {

constexpr int kSnapshotVersion = 1;

nlohmann::json row_major(const Eigen::MatrixXd& M) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      arr.push_back(M(i, j));
    }
  }
  return arr;
}

Eigen::MatrixXd read_matrix(const nlohmann::json& j, const char* key, Eigen::Index rows, Eigen::Index cols) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    throw ConfigError(std::string("snapshot: field '") + key + "' must hold " + std::to_string(rows * cols) +
                      " numbers");
  }
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      M(i, j2) = arr.at(static_cast<std::size_t>(i * cols + j2)).get<double>();
    }
  }
  return M;
}

nlohmann::json header(const std::string& kind, Eigen::Index n, Eigen::Index n_u) {
  return {{"version", kSnapshotVersion}, {"estimator", kind}, {"n", n}, {"n_u", n_u}};
}

void check_header(const nlohmann::json& j, const std::string& kind) {
  if (j.value("version", 0) != kSnapshotVersion) {
    throw ConfigError("snapshot: unsupported version");
  }
  if (j.value("estimator", std::string("airls")) != kind) {
    throw ConfigError("snapshot: expected estimator '" + kind + "'");
  }
}

}  // namespace

Eigen::VectorXd PointEstimate::stacked() const {
  Eigen::VectorXd v(x_next_hat.size() + x_hat.size() + u_hat.size());
  v << x_next_hat, x_hat, u_hat;
  return v;
}

nlohmann::json AirlsEstimator::snapshot() const {
  nlohmann::json j = header(kind(), n_, n_u_);
  j["beta"] = config_.beta;
  j["alpha"] = config_.alpha;
  j["K"] = config_.K;
  j["L_Z"] = config_.L_Z;
  j["L_Theta"] = config_.L_Theta;
  j["ridge_fallback"] = config_.ridge_fallback;
  j["ridge_eps"] = config_.ridge_eps;
  j["c0_scale"] = config_.c0_scale;
  j["point_iters"] = config_.point_iters;
  j["theta_hat"] = row_major(state_.theta_hat);
  j["C"] = row_major(state_.corr.C);
  j["M"] = reg_.rows();
  j["Psi"] = row_major(reg_.Psi);
  j["mu"] = row_major(reg_.mu);
  j["last_residual_sq"] = state_.last_residual_sq;
  j["step"] = state_.step;
  return j;
}

AirlsEstimator AirlsEstimator::from_snapshot(const nlohmann::json& j) {
  check_header(j, "airls");
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index n_u = j.at("n_u").get<Eigen::Index>();
  const Eigen::Index m = 2 * n + n_u;
  EstimatorConfig cfg;
  cfg.beta = j.at("beta").get<double>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.K = j.at("K").get<int>();
  cfg.L_Z = j.at("L_Z").get<int>();
  cfg.L_Theta = j.at("L_Theta").get<int>();
  cfg.ridge_fallback = j.value("ridge_fallback", cfg.ridge_fallback);
  cfg.ridge_eps = j.value("ridge_eps", cfg.ridge_eps);
  cfg.c0_scale = j.value("c0_scale", cfg.c0_scale);
  cfg.point_iters = j.value("point_iters", cfg.point_iters);
  cfg.validate();

  Regularization reg = Regularization::none(n, n_u);
  const Eigen::Index M = j.value("M", Eigen::Index{0});
  if (M > 0) {
    reg.Psi = read_matrix(j, "Psi", M, n * (n + n_u));
    reg.mu = read_matrix(j, "mu", M, 1);
  }

  EstimatorState state;
  state.corr.n = n;
  state.corr.n_u = n_u;
  state.corr.beta = cfg.beta;
  state.corr.C = read_matrix(j, "C", m, m);
  state.theta_hat = read_matrix(j, "theta_hat", n, n + n_u);
  state.z_hat = state.corr.Z();
  state.step = j.at("step").get<std::int64_t>();
  state.last_residual_sq = residual(state.theta_hat, state.corr, reg);
  return AirlsEstimator(std::move(state), cfg, std::move(reg));
}

nlohmann::json RtlsEstimator::snapshot() const {
  nlohmann::json j = header(kind(), state_.n, state_.n_u);
  j["beta"] = config_.beta;
  j["power_iters"] = config_.power_iters;
  j["c0_scale"] = config_.c0_scale;
  j["jitter"] = config_.jitter;
  j["theta_hat"] = row_major(theta());
  j["C"] = row_major(state_.C_tilde);
  j["basis"] = row_major(state_.nullspace_basis);
  j["step"] = state_.step;
  return j;
}

RtlsEstimator RtlsEstimator::from_snapshot(const nlohmann::json& j) {
  check_header(j, "rtls");
  RtlsConfig cfg;
  cfg.beta = j.at("beta").get<double>();
  cfg.power_iters = j.value("power_iters", cfg.power_iters);
  cfg.c0_scale = j.value("c0_scale", cfg.c0_scale);
  cfg.jitter = j.value("jitter", cfg.jitter);
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index n_u = j.at("n_u").get<Eigen::Index>();
  RtlsState s = RtlsState::initial(n, n_u, cfg);
  s.C_tilde = read_matrix(j, "C", s.C_tilde.rows(), s.C_tilde.cols());
  s.nullspace_basis = read_matrix(j, "basis", s.C_tilde.rows(), n);
  s.step = j.at("step").get<std::int64_t>();
  return RtlsEstimator(std::move(s), cfg);
}

nlohmann::json RlsEstimator::snapshot() const {
  nlohmann::json j = header(kind(), n(), n_u());
  j["beta"] = config_.beta;
  j["delta"] = config_.delta;
  j["jitter"] = config_.jitter;
  j["theta_hat"] = row_major(state_.theta_hat);
  j["information"] = row_major(state_.information);
  j["C"] = row_major(state_.correlation);
  j["step"] = state_.step;
  return j;
}

RlsEstimator RlsEstimator::from_snapshot(const nlohmann::json& j) {
  check_header(j, "rls");
  RlsConfig cfg;
  cfg.beta = j.at("beta").get<double>();
  cfg.delta = j.value("delta", cfg.delta);
  cfg.jitter = j.value("jitter", cfg.jitter);
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index n_u = j.at("n_u").get<Eigen::Index>();
  RlsState s = RlsState::initial(n, n_u, cfg);
  s.theta_hat = read_matrix(j, "theta_hat", n, n + n_u);
  s.information = read_matrix(j, "information", n + n_u, n + n_u);
  s.correlation = read_matrix(j, "C", 2 * n + n_u, 2 * n + n_u);
  s.step = j.at("step").get<std::int64_t>();
  return RlsEstimator(std::move(s), cfg);
}

std::unique_ptr<Estimator> restore_estimator(const nlohmann::json& snapshot) {
  const std::string kind = snapshot.value("estimator", std::string("airls"));
  if (kind == "airls") {
    return std::make_unique<AirlsEstimator>(AirlsEstimator::from_snapshot(snapshot));
  }
  if (kind == "rtls") {
    return std::make_unique<RtlsEstimator>(RtlsEstimator::from_snapshot(snapshot));
  }
  if (kind == "rls") {
    return std::make_unique<RlsEstimator>(RlsEstimator::from_snapshot(snapshot));
  }
  throw ConfigError("snapshot: unknown estimator '" + kind + "'");
}

}  // namespace airls
