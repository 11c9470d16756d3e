#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "airls/airls.hpp"
#include "airls/baselines.hpp"
#include "airls/bench.hpp"
#include "airls/config.hpp"
#include "airls/errors.hpp"
#include "airls/trace_io.hpp"

namespace py = pybind11;
using namespace airls;

namespace {

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["estimator"] = r.estimator;
  d["ratio"] = r.ratio;
  d["eps_F_mean"] = r.eps_F_mean;
  d["eps_F_std"] = r.eps_F_std;
  d["rmse_mean"] = r.rmse_mean;
  d["trials"] = r.trials;
  d["failed"] = r.failed;
  return d;
}

std::vector<TrajectorySample> simulate(const ExperimentConfig& cfg, std::int64_t N) {
  return generate_trajectory(cfg.system, cfg.x0, cfg.input_std, N, cfg.noise);
}

}  // namespace

PYBIND11_MODULE(_airls, m) {
  m.doc() = "Online robust identification of linear systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularNormalMatrix>(m, "SingularNormalMatrix", PyExc_ArithmeticError);
  py::register_exception<SingularMatrix>(m, "SingularMatrix", PyExc_ArithmeticError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<InvalidBounds>(m, "InvalidBounds", PyExc_ValueError);
  py::register_exception<ZeroTruth>(m, "ZeroTruth", PyExc_ValueError);

  py::class_<LinearSystem>(m, "LinearSystem")
      .def(py::init<Eigen::MatrixXd, Eigen::MatrixXd>(), py::arg("A"), py::arg("B"))
      .def_readwrite("A", &LinearSystem::A)
      .def_readwrite("B", &LinearSystem::B)
      .def_property_readonly("n", &LinearSystem::n)
      .def_property_readonly("n_u", &LinearSystem::n_u)
      .def("theta", &LinearSystem::theta)
      .def_static("benchmark", &LinearSystem::benchmark);

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("enabled", &NoiseConfig::enabled)
      .def_readwrite("snr", &NoiseConfig::snr)
      .def_readwrite("outlier_ratio", &NoiseConfig::outlier_ratio)
      .def_readwrite("outlier_low", &NoiseConfig::outlier_low)
      .def_readwrite("outlier_high", &NoiseConfig::outlier_high)
      .def_readwrite("seed", &NoiseConfig::seed)
      .def_static("off", &NoiseConfig::off);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def(py::init<>())
      .def_readwrite("t", &TrajectorySample::t)
      .def_readwrite("x_next", &TrajectorySample::x_next)
      .def_readwrite("x", &TrajectorySample::x)
      .def_readwrite("u", &TrajectorySample::u)
      .def_readwrite("x_next_noisy", &TrajectorySample::x_next_noisy)
      .def_readwrite("x_noisy", &TrajectorySample::x_noisy)
      .def_readwrite("u_noisy", &TrajectorySample::u_noisy)
      .def_readwrite("is_outlier", &TrajectorySample::is_outlier)
      .def("stacked", &TrajectorySample::stacked, py::arg("noisy") = true);

  m.def("generate_trajectory", &generate_trajectory, py::arg("system"), py::arg("x0"), py::arg("input_std"),
        py::arg("N"), py::arg("noise"));
  m.def("read_trace", py::overload_cast<const std::string&>(&read_trace), py::arg("path"));
  m.def("write_trace", py::overload_cast<const std::string&, const std::vector<TrajectorySample>&>(&write_trace),
        py::arg("path"), py::arg("trace"));

  py::class_<PointEstimate>(m, "PointEstimate")
      .def_readonly("x_next_hat", &PointEstimate::x_next_hat)
      .def_readonly("x_hat", &PointEstimate::x_hat)
      .def_readonly("u_hat", &PointEstimate::u_hat);

  py::class_<EstimatorConfig>(m, "AirlsConfig")
      .def(py::init<>())
      .def_readwrite("beta", &EstimatorConfig::beta)
      .def_readwrite("alpha", &EstimatorConfig::alpha)
      .def_readwrite("K", &EstimatorConfig::K)
      .def_readwrite("L_Z", &EstimatorConfig::L_Z)
      .def_readwrite("L_Theta", &EstimatorConfig::L_Theta)
      .def_readwrite("ridge_fallback", &EstimatorConfig::ridge_fallback)
      .def_readwrite("ridge_eps", &EstimatorConfig::ridge_eps)
      .def_readwrite("c0_scale", &EstimatorConfig::c0_scale)
      .def_readwrite("point_iters", &EstimatorConfig::point_iters)
      .def_readwrite("theta0", &EstimatorConfig::theta0);

  py::class_<RtlsConfig>(m, "RtlsConfig")
      .def(py::init<>())
      .def_readwrite("beta", &RtlsConfig::beta)
      .def_readwrite("power_iters", &RtlsConfig::power_iters)
      .def_readwrite("c0_scale", &RtlsConfig::c0_scale)
      .def_readwrite("jitter", &RtlsConfig::jitter);

  py::class_<RlsConfig>(m, "RlsConfig")
      .def(py::init<>())
      .def_readwrite("beta", &RlsConfig::beta)
      .def_readwrite("delta", &RlsConfig::delta)
      .def_readwrite("jitter", &RlsConfig::jitter);

  py::class_<Estimator>(m, "Estimator")
      .def_property_readonly("kind", &Estimator::kind)
      .def_property_readonly("n", &Estimator::n)
      .def_property_readonly("n_u", &Estimator::n_u)
      .def("step", &Estimator::step, py::arg("sample"))
      .def(
          "run",
          [](Estimator& e, const std::vector<TrajectorySample>& trace) {
            for (const auto& s : trace) e.step(s);
          },
          py::arg("trace"))
      .def("theta", &Estimator::theta)
      .def("correlation", &Estimator::correlation)
      .def("point_estimate", &Estimator::point_estimate, py::arg("sample"))
      .def("snapshot", [](const Estimator& e) { return e.snapshot().dump(); });

  py::class_<AirlsEstimator, Estimator>(m, "AirlsEstimator")
      .def(py::init([](Eigen::Index n, Eigen::Index n_u, const EstimatorConfig& cfg, double psi) {
             return AirlsEstimator(n, n_u, cfg, Regularization::scaled_identity(n, n_u, psi));
           }),
           py::arg("n"), py::arg("n_u"), py::arg("config") = EstimatorConfig{}, py::arg("psi") = 1e-3)
      .def("residual_sq", &AirlsEstimator::residual_sq);
  py::class_<RtlsEstimator, Estimator>(m, "RtlsEstimator")
      .def(py::init<Eigen::Index, Eigen::Index, RtlsConfig>(), py::arg("n"), py::arg("n_u"),
           py::arg("config") = RtlsConfig{})
      .def("identified", &RtlsEstimator::identified);
  py::class_<RlsEstimator, Estimator>(m, "RlsEstimator")
      .def(py::init<Eigen::Index, Eigen::Index, RlsConfig>(), py::arg("n"), py::arg("n_u"),
           py::arg("config") = RlsConfig{});

  m.def(
      "restore_estimator", [](const std::string& text) { return restore_estimator(nlohmann::json::parse(text)); },
      py::arg("snapshot"));

  m.def("rel_frobenius_error", &rel_frobenius_error, py::arg("truth"), py::arg("estimate"));
  m.def(
      "weighted_pseudo_inverse",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& w) { return weighted_pseudo_inverse(X, WeightMatrix{w}); },
      py::arg("X"), py::arg("w"));
  m.def(
      "make_projector",
      [](const Eigen::MatrixXd& theta, const Eigen::VectorXd& w) { return make_projector(theta, WeightMatrix{w}).matrix; },
      py::arg("theta"), py::arg("w"));
  m.def(
      "update_z_column",
      [](const Eigen::MatrixXd& theta, const Eigen::VectorXd& c, const Eigen::VectorXd& w) {
        return update_z_column(theta, c, WeightMatrix{w});
      },
      py::arg("theta"), py::arg("c"), py::arg("w"));
  m.def("check_beta_bound", &check_beta_bound, py::arg("gamma_max"), py::arg("gamma_min"), py::arg("beta"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("system", &ExperimentConfig::system)
      .def_readwrite("x0", &ExperimentConfig::x0)
      .def_readwrite("input_std", &ExperimentConfig::input_std)
      .def_readwrite("noise", &ExperimentConfig::noise)
      .def_readwrite("N", &ExperimentConfig::N)
      .def_readwrite("fast_N", &ExperimentConfig::fast_N)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("ratios", &ExperimentConfig::ratios)
      .def_readwrite("seed_base", &ExperimentConfig::seed_base)
      .def_readwrite("rmse_window", &ExperimentConfig::rmse_window)
      .def_readwrite("simulate_N", &ExperimentConfig::simulate_N)
      .def_property_readonly("estimators",
                             [](const ExperimentConfig& c) {
                               std::vector<std::string> names;
                               for (const auto& e : c.estimators) names.push_back(e.name);
                               return names;
                             })
      .def(
          "make_estimator",
          [](const ExperimentConfig& c, const std::string& name) {
            const EstimatorSpec* spec = c.find_estimator(name);
            if (spec == nullptr) throw ConfigError("no estimator named '" + name + "'");
            return spec->make(c.system.n(), c.system.n_u());
          },
          py::arg("name"))
      .def("simulate", &simulate, py::arg("N"));

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "run_sweep",
      [](const ExperimentConfig& cfg, bool fast, unsigned threads) {
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = run_sweep(cfg, fast, threads);
        }
        py::list rows;
        for (const auto& r : result.rows) rows.append(row_dict(r));
        return rows;
      },
      py::arg("config"), py::arg("fast") = false, py::arg("threads") = 0);
  m.def(
      "sweep_csv",
      [](const ExperimentConfig& cfg, bool fast, unsigned threads) {
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          write_sweep_csv(out, run_sweep(cfg, fast, threads).rows);
        }
        return out.str();
      },
      py::arg("config"), py::arg("fast") = false, py::arg("threads") = 0);
}
