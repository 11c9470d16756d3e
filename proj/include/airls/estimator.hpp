#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "airls/system.hpp"

namespace airls {

/// Reconstructed (x_{t+1}, x_t, u_t) for one sample.
struct PointEstimate {
  Eigen::VectorXd x_next_hat;
  Eigen::VectorXd x_hat;
  Eigen::VectorXd u_hat;

  Eigen::VectorXd stacked() const;
};

/// Common contract of every online estimator: construct from a config, feed
/// samples one at a time, read back [A, B] and per-sample reconstructions.
class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index n() const = 0;
  virtual Eigen::Index n_u() const = 0;

  /// Consumes the measured fields of one sample.
  virtual void step(const TrajectorySample& sample) = 0;

  /// Current [A_hat, B_hat].
  virtual Eigen::MatrixXd theta() const = 0;

  /// Correlation matrix the estimator works from (m x m).
  virtual Eigen::MatrixXd correlation() const = 0;

  virtual PointEstimate point_estimate(const TrajectorySample& sample) const = 0;

  /// Versioned JSON snapshot; restore_estimator() reverses it.
  virtual nlohmann::json snapshot() const = 0;
};

std::unique_ptr<Estimator> restore_estimator(const nlohmann::json& snapshot);

}  // namespace airls
