#include "doctest.h"

#include "airls/errors.hpp"
#include "airls/linalg.hpp"
#include "oracles.hpp"

using airls::LsMethod;
using airls::WeightMatrix;

namespace {

WeightMatrix weights(const Eigen::VectorXd& d) { return WeightMatrix{d}; }

}  // namespace

TEST_CASE("weighted pseudo-inverse of the identity is the identity") {
  const Eigen::MatrixXd P = airls::weighted_pseudo_inverse(Eigen::MatrixXd::Identity(3, 3), WeightMatrix::identity(3));
  CHECK((P - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("weighted pseudo-inverse of a column of ones") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 1);
  for (auto method : {LsMethod::kNormalEquations, LsMethod::kQr}) {
    const Eigen::MatrixXd P = airls::weighted_pseudo_inverse(X, weights(Eigen::Vector2d(1.0, 3.0)), method);
    REQUIRE(P.rows() == 1);
    REQUIRE(P.cols() == 2);
    CHECK(P(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(P(0, 1) == doctest::Approx(0.75).epsilon(1e-14));
  }
}

TEST_CASE("pseudo-inverse at W = I matches a generic least-squares oracle") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd X = rng.normal(6, 3);
    const Eigen::MatrixXd P = airls::weighted_pseudo_inverse(X, WeightMatrix::identity(6));
    CHECK(oracle::rel(P, oracle::pinv(X)) < 1e-9);
  }
}

TEST_CASE("pseudo-inverse reproduces X on random weighted instances") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p = 4 + trial % 6;
    const Eigen::Index q = 1 + trial % 4;
    const Eigen::MatrixXd X = rng.normal(p, q);
    const WeightMatrix W{rng.positive(p)};
    for (auto method : {LsMethod::kNormalEquations, LsMethod::kQr}) {
      const Eigen::MatrixXd P = airls::weighted_pseudo_inverse(X, W, method);
      CHECK(oracle::rel(X * P * X, X) < 1e-9);
    }
  }
}

TEST_CASE("weighted pseudo-inverse rejects bad input") {
  CHECK_THROWS_AS(airls::weighted_pseudo_inverse(Eigen::MatrixXd::Ones(3, 2), WeightMatrix::identity(3)),
                  airls::SingularNormalMatrix);
  CHECK_THROWS_AS(airls::weighted_pseudo_inverse(Eigen::MatrixXd::Ones(3, 1), WeightMatrix::identity(2)),
                  airls::DimensionMismatch);
  Eigen::MatrixXd X(2, 2);
  X << 1.0, 0.0, 0.0, 1e-7;
  CHECK_THROWS_AS(airls::weighted_pseudo_inverse(X, WeightMatrix::identity(2)), airls::SingularNormalMatrix);
}

TEST_CASE("solve_weighted_ls examples") {
  SUBCASE("identity regressor returns b") {
    oracle::Rng rng(3);
    const Eigen::VectorXd b = rng.normal(4, 1);
    const Eigen::VectorXd z = airls::solve_weighted_ls(Eigen::MatrixXd::Identity(4, 4), b, WeightMatrix{rng.positive(4)});
    CHECK((z - b).norm() < 1e-14);
  }
  SUBCASE("weighted mean") {
    const Eigen::VectorXd z =
        airls::solve_weighted_ls(Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(0.0, 4.0), weights(Eigen::Vector2d(1, 3)));
    CHECK(z(0) == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("consistent overdetermined system is solved exactly") {
    oracle::Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd X = rng.normal(8, 3);
      const Eigen::VectorXd z_star = rng.normal(3, 1);
      const Eigen::VectorXd z = airls::solve_weighted_ls(X, X * z_star, WeightMatrix{rng.positive(8)});
      CHECK((z - z_star).norm() <= 1e-10 * std::max(1.0, z_star.norm()));
    }
  }
  SUBCASE("matches SVD oracle") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd X = rng.normal(7, 3);
      const Eigen::VectorXd b = rng.normal(7, 1);
      const Eigen::VectorXd w = rng.positive(7);
      for (auto method : {LsMethod::kNormalEquations, LsMethod::kQr}) {
        CHECK(oracle::rel(airls::solve_weighted_ls(X, b, WeightMatrix{w}, method), oracle::weighted_ls(X, b, w)) <
              1e-9);
      }
    }
  }
}

TEST_CASE("IRLS weights") {
  const WeightMatrix W = WeightMatrix::from_residual(Eigen::Vector3d(3.0, 0.0, 0.0), 16.0);
  CHECK(W.diag(0) == doctest::Approx(0.2));
  CHECK(W.diag(1) == doctest::Approx(0.25));
  CHECK(W.inverse().diag(0) == doctest::Approx(5.0));
  CHECK_THROWS(WeightMatrix::from_residual(Eigen::Vector3d::Zero(), 0.0));

  oracle::Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = rng.uniform(1e-8, 1.0);
    const WeightMatrix V = WeightMatrix::from_residual(rng.normal(9, 1, 5.0), alpha);
    CHECK((V.diag.array() > 0.0).all());
    CHECK((V.diag.array() <= 1.0 / std::sqrt(alpha) * (1 + 1e-15)).all());
  }
}

TEST_CASE("projector with zero parameters keeps the Z coordinates") {
  const Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 4);
  const auto P = airls::make_projector(theta, WeightMatrix::identity(6));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
  expected.bottomRightCorner(4, 4).setIdentity();
  CHECK((P.matrix - expected).norm() < 1e-14);
}

TEST_CASE("projector invariants and KKT oracle") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const Eigen::Index nu = 1 + (trial / 3) % 3;
    const Eigen::Index m = 2 * n + nu;
    const Eigen::MatrixXd theta = rng.normal(n, n + nu);
    const Eigen::VectorXd w = rng.positive(m);
    const auto P = airls::make_projector(theta, WeightMatrix{w});
    const Eigen::MatrixXd G = airls::constraint_matrix(theta);

    CHECK((P.matrix * P.matrix - P.matrix).norm() <= 1e-9 * P.matrix.norm());
    CHECK((G * P.matrix).norm() <= 1e-9 * G.norm());

    const Eigen::VectorXd c = rng.normal(m, 1);
    CHECK(oracle::rel(P.apply(c), oracle::constrained_projection(G, c, w)) < 1e-8);

    // A vector already in the null space is a fixed point.
    const Eigen::VectorXd z = rng.normal(n + nu, 1);
    Eigen::VectorXd v(m);
    v << theta * z, z;
    CHECK(oracle::rel(P.apply(v), v) < 1e-12);
  }
}

TEST_CASE("projector with W = I is orthogonal") {
  oracle::Rng rng(8);
  const Eigen::MatrixXd theta = rng.normal(2, 4);
  const auto P = airls::make_projector(theta, WeightMatrix::identity(6));
  CHECK((P.matrix - P.matrix.transpose()).norm() < 1e-12);
}
