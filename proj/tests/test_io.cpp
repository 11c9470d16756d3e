#include "doctest.h"

#include <sstream>

#include "airls/bench.hpp"
#include "airls/config.hpp"
#include "airls/errors.hpp"
#include "airls/trace_io.hpp"

namespace {

std::vector<airls::TrajectorySample> sample_trace(std::int64_t N) {
  airls::NoiseConfig noise;
  noise.seed = 4;
  noise.outlier_ratio = 0.05;
  return airls::generate_trajectory(airls::LinearSystem::benchmark(), Eigen::Vector2d(0.1, -0.2), 0.1, N, noise);
}

}  // namespace

TEST_CASE("trace header layout") {
  CHECK(airls::trace_header(2, 1) ==
        "t,x1,x2,u1,x1_next,x2_next,x1_noisy,x2_noisy,u1_noisy,x1_next_noisy,x2_next_noisy,is_outlier");
}

TEST_CASE("trace CSV round-trips exactly") {
  const auto trace = sample_trace(200);
  std::stringstream buf;
  airls::write_trace(buf, trace);
  const auto back = airls::read_trace(buf);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back[i].t == trace[i].t);
    CHECK(back[i].stacked(true) == trace[i].stacked(true));
    CHECK(back[i].stacked(false) == trace[i].stacked(false));
    CHECK(back[i].is_outlier == trace[i].is_outlier);
  }
}

TEST_CASE("malformed traces are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(airls::read_trace(empty), airls::ConfigError);
  std::istringstream header("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(airls::read_trace(header), airls::ConfigError);
  std::stringstream short_row;
  short_row << airls::trace_header(1, 1) << "\n0,1,2\n";
  CHECK_THROWS_AS(airls::read_trace(short_row), airls::ConfigError);
  std::stringstream bad_number;
  bad_number << airls::trace_header(1, 1) << "\n0,1,2,3,4,5,six,0\n";
  CHECK_THROWS_AS(airls::read_trace(bad_number), airls::ConfigError);
}

TEST_CASE("snapshots restore every estimator exactly") {
  const auto trace = sample_trace(300);
  for (const std::string kind : {"airls", "rtls", "rls"}) {
    const auto spec = airls::EstimatorSpec::named(kind);
    auto full = spec.make(2, 2);
    auto half = spec.make(2, 2);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      full->step(trace[i]);
      if (i < 150) half->step(trace[i]);
    }
    const std::string text = half->snapshot().dump();
    auto resumed = airls::restore_estimator(nlohmann::json::parse(text));
    CHECK(resumed->kind() == kind);
    for (std::size_t i = 150; i < trace.size(); ++i) resumed->step(trace[i]);
    CHECK((resumed->theta() - full->theta()).norm() == 0.0);
  }
}

TEST_CASE("AIRLS snapshot carries the documented fields") {
  airls::AirlsEstimator est(2, 2, airls::EstimatorConfig{}, airls::Regularization::scaled_identity(2, 2, 1e-3));
  for (const auto& s : sample_trace(20)) est.step(s);
  const auto j = est.snapshot();
  for (const char* key : {"n", "n_u", "beta", "alpha", "K", "L_Z", "L_Theta", "theta_hat", "C", "step"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["theta_hat"].size() == 8);
  CHECK(j["C"].size() == 36);
  CHECK(j["step"] == 20);
  CHECK(j["theta_hat"][1].get<double>() == est.theta()(0, 1));
}

TEST_CASE("bad snapshots are rejected") {
  CHECK_THROWS_AS(airls::restore_estimator({{"version", 1}, {"estimator", "kalman"}}), airls::ConfigError);
  nlohmann::json j = airls::EstimatorSpec::named("rls").make(2, 2)->snapshot();
  j["theta_hat"] = {1.0, 2.0};
  CHECK_THROWS(airls::restore_estimator(j));
}

TEST_CASE("config parsing fills every section") {
  const auto cfg = airls::parse_config(R"(
[system]
A = [[0.5, 0.0], [0.0, 0.5]]
B = [[1.0], [2.0]]
x0 = [1.0, -1.0]
input_std = 0.2

[noise]
mode = "on"
snr = 50
outlier_low = -0.5
outlier_high = 0.5
outlier_ratio = 0.02
seed = 9

[simulate]
N = 123

[estimator.airls]
beta = 0.99
alpha = 1e-6
K = 2
psi = 0.01

[estimator.slow_rtls]
kind = "rtls"
beta = 0.999
power_iters = 3

[sweep]
N = 1000
fast_N = 100
trials = 4
seed_base = 77
ratio_min = 0.001
ratio_max = 0.1
ratio_points = 3
estimators = ["slow_rtls", "airls"]
)");
  CHECK(cfg.system.A(0, 0) == 0.5);
  CHECK(cfg.system.n_u() == 1);
  CHECK(cfg.x0(1) == -1.0);
  CHECK(cfg.input_std == 0.2);
  CHECK(cfg.noise.snr == 50.0);
  CHECK(cfg.noise.outlier_high == 0.5);
  CHECK(cfg.noise.seed == 9);
  CHECK(cfg.simulate_N == 123);
  CHECK(cfg.N == 1000);
  CHECK(cfg.trials == 4);
  CHECK(cfg.seed_base == 77);
  REQUIRE(cfg.ratios.size() == 3);
  CHECK(cfg.ratios[1] == doctest::Approx(0.01));
  REQUIRE(cfg.estimators.size() == 2);
  CHECK(cfg.estimators[0].name == "slow_rtls");
  CHECK(cfg.estimators[0].rtls.power_iters == 3);
  CHECK(cfg.estimators[0].beta() == 0.999);
  CHECK(cfg.estimators[1].airls.K == 2);
  CHECK(cfg.estimators[1].psi_scale == 0.01);
}

TEST_CASE("empty config keeps the defaults") {
  const auto cfg = airls::parse_config("");
  CHECK(cfg.N == 50000);
  CHECK(cfg.fast_N == 5000);
  CHECK(cfg.trials == 10);
  CHECK(cfg.ratios.size() == 20);
  REQUIRE(cfg.estimators.size() == 3);
  CHECK(cfg.estimators[0].airls.beta == 0.995);
  CHECK(cfg.estimators[0].airls.alpha == 1e-8);
  CHECK(cfg.estimators[0].psi_scale == 1e-3);
  CHECK(cfg.noise.snr == 100.0);
  CHECK(cfg.x0.isZero());
}

TEST_CASE("noise can be switched off") {
  const auto cfg = airls::parse_config("[noise]\nmode = \"off\"\n");
  CHECK_FALSE(cfg.noise.enabled);
}

TEST_CASE("invalid configs raise ConfigError") {
  const char* bad[] = {
      "[system]\nA = [[1, 2]]\n",
      "[system]\nx0 = [1, 2, 3]\n",
      "[noise]\nsnr = -1\n",
      "[noise]\nmode = \"maybe\"\n",
      "[noise]\nsnr = \"high\"\n",
      "[estimator.airls]\nbeta = 1.5\n",
      "[estimator.airls]\nK = 0\n",
      "[estimator.airls]\nunknown = 1\n",
      "[estimator.x]\nkind = \"ekf\"\n",
      "[sweep]\ntrials = 0\n",
      "[sweep]\nratios = [0.1, 0.01]\n",
      "[sweep]\nestimators = [\"nope\"]\n",
      "[sweep]\nratios = [0.1]\nratio_min = 0.01\n",
      "[other]\nx = 1\n",
      "this is not toml",
  };
  for (const char* text : bad) {
    CHECK_THROWS_AS_MESSAGE(airls::parse_config(text), airls::ConfigError, text);
  }
}
