#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "airls/bench.hpp"
#include "airls/config.hpp"
#include "airls/errors.hpp"
#include "airls/trace_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kSnrConvention = "per-channel mean signal power divided by Gaussian noise variance";

nlohmann::json estimator_meta(const airls::EstimatorSpec& e) {
  nlohmann::json j = {{"name", e.name}, {"kind", e.kind}, {"beta", e.beta()}};
  if (e.kind == "airls") {
    j["alpha"] = e.airls.alpha;
    j["K"] = e.airls.K;
    j["L_Z"] = e.airls.L_Z;
    j["L_Theta"] = e.airls.L_Theta;
    j["psi"] = e.psi_scale;
    j["c0_scale"] = e.airls.c0_scale;
  } else if (e.kind == "rtls") {
    j["power_iters"] = e.rtls.power_iters;
    j["c0_scale"] = e.rtls.c0_scale;
  } else {
    j["delta"] = e.rls.delta;
  }
  return j;
}

nlohmann::json noise_meta(const airls::NoiseConfig& n) {
  return {{"enabled", n.enabled},
          {"snr", n.snr},
          {"snr_definition", kSnrConvention},
          {"outlier_low", n.outlier_low},
          {"outlier_high", n.outlier_high}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw airls::ConfigError("cannot open '" + path + "' for writing");
  }
  out << text;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw airls::ConfigError("cannot open '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw airls::ConfigError(path + ": " + e.what());
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
  const auto cfg = airls::load_config(config_path);
  const auto trace = airls::generate_trajectory(cfg.system, cfg.x0, cfg.input_std, cfg.simulate_N, cfg.noise);
  airls::write_trace(out_path, trace);

  std::size_t outliers = 0;
  for (const auto& s : trace) outliers += s.is_outlier ? 1 : 0;
  nlohmann::json meta = noise_meta(cfg.noise);
  meta["N"] = cfg.simulate_N;
  meta["seed"] = cfg.noise.seed;
  meta["outlier_ratio"] = cfg.noise.outlier_ratio;
  meta["outliers"] = outliers;
  meta["input_std"] = cfg.input_std;
  write_text(out_path + ".meta.json", meta.dump(2) + "\n");
  std::cout << fmt::format("wrote {} samples ({} outliers) to {}\n", trace.size(), outliers, out_path);
  return 0;
}

int cmd_estimate(const std::string& kind, const std::string& trace_path, const std::string& snapshot_path,
                 const std::string& config_path, const std::string& resume_path) {
  const auto trace = airls::read_trace(trace_path);
  const auto n = trace.front().x.size();
  const auto n_u = trace.front().u.size();

  std::unique_ptr<airls::Estimator> est;
  if (!resume_path.empty()) {
    est = airls::restore_estimator(read_json(resume_path));
    if (est->kind() != kind) {
      throw airls::ConfigError("--resume snapshot holds a '" + est->kind() + "' estimator, not '" + kind + "'");
    }
    if (est->n() != n || est->n_u() != n_u) {
      throw airls::ConfigError("--resume snapshot dimensions do not match the trace");
    }
  } else {
    airls::EstimatorSpec spec = airls::EstimatorSpec::named(kind);
    if (!config_path.empty()) {
      const auto cfg = airls::load_config(config_path);
      if (const auto* found = cfg.find_estimator(kind)) spec = *found;
    }
    spec.validate();
    est = spec.make(n, n_u);
  }

  for (const auto& s : trace) est->step(s);
  const Eigen::MatrixXd theta = est->theta();
  if (!theta.allFinite()) {
    throw airls::SingularMatrix("estimate is not finite");
  }
  write_text(snapshot_path, est->snapshot().dump(2) + "\n");

  std::cout << fmt::format("{} after {} samples, [A, B] =\n", kind, trace.size());
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) row += fmt::format(" {:.6g}", theta(i, j));
    std::cout << " " << row << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, bool fast,
              const std::vector<std::string>& overlays, const std::string& trials_path) {
  const auto cfg = airls::load_config(config_path);
  std::vector<airls::SweepRow> extra;
  for (const auto& path : overlays) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw airls::ConfigError("cannot open overlay '" + path + "'");
    }
    const auto rows = airls::read_sweep_csv(in);
    extra.insert(extra.end(), rows.begin(), rows.end());
  }

  const auto result = airls::run_sweep(cfg, fast);
  const auto rows = airls::merge_rows(result.rows, extra);
  std::ostringstream csv;
  airls::write_sweep_csv(csv, rows);
  write_text(out_path, csv.str());

  nlohmann::json meta = noise_meta(cfg.noise);
  meta["N"] = fast ? cfg.fast_N : cfg.N;
  meta["trials"] = cfg.trials;
  meta["seed_base"] = cfg.seed_base;
  meta["seed_rule"] = "seed_base + 1000 * ratio_index + trial";
  meta["input_std"] = cfg.input_std;
  meta["ratios"] = cfg.ratios;
  meta["eps_F_averaging"] = "mean of per-trial errors";
  meta["estimators"] = nlohmann::json::array();
  for (const auto& e : cfg.estimators) meta["estimators"].push_back(estimator_meta(e));
  meta["overlays"] = overlays;
  write_text(out_path + ".meta.json", meta.dump(2) + "\n");

  if (!trials_path.empty()) {
    std::string text = "estimator,ratio,seed,eps_F,state_rmse,runtime_ms,beta_bound_ok,ok\n";
    for (const auto& t : result.trials) {
      text += fmt::format("{},{},{},{},{},{:.3f},{},{}\n", t.estimator, t.outlier_ratio, t.seed, t.eps_F,
                          t.state_rmse, t.runtime_ms, t.beta_bound_ok ? 1 : 0, t.ok ? 1 : 0);
    }
    write_text(trials_path, text);
  }

  bool empty_cell = false;
  for (const auto& t : result.trials) {
    if (!t.ok) {
      std::cerr << fmt::format("warning: {} ratio={} seed={} failed: {}\n", t.estimator, t.outlier_ratio, t.seed,
                               t.error);
    }
  }
  for (const auto& r : result.rows) {
    if (r.failed > 0) {
      std::cerr << fmt::format("warning: {} ratio={}: {} of {} trials failed\n", r.estimator, r.ratio, r.failed,
                               r.failed + r.trials);
    }
    empty_cell = empty_cell || r.trials == 0;
  }
  std::cout << fmt::format("wrote {} rows to {}\n", rows.size(), out_path);
  return empty_cell ? kExitNumerical : 0;
}

int cmd_states(const std::string& snapshot_path, const std::string& trace_path, const std::string& out_path) {
  const auto est = airls::restore_estimator(read_json(snapshot_path));
  const auto trace = airls::read_trace(trace_path);
  if (trace.front().x.size() != est->n() || trace.front().u.size() != est->n_u()) {
    throw airls::ConfigError("snapshot dimensions do not match the trace");
  }
  std::ostringstream csv;
  airls::reconstruct_states(*est, trace, csv);
  write_text(out_path, csv.str());
  std::cout << fmt::format("wrote {} rows to {}\n", trace.size(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust online identification of linear systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::string snapshot_path;
  std::string resume_path;
  std::string trials_path;
  std::string kind = "airls";
  std::vector<std::string> overlays;
  bool fast = false;

  auto* simulate = app.add_subcommand("simulate", "Generate a noisy trajectory trace");
  simulate->add_option("--config", config_path, "TOML config")->required();
  simulate->add_option("--out", out_path, "Output trace CSV")->required();

  auto* estimate = app.add_subcommand("estimate", "Run one estimator over a trace and save a snapshot");
  estimate->add_option("--estimator", kind, "Estimator kind")
      ->check(CLI::IsMember({"airls", "rtls", "rls"}))
      ->required();
  estimate->add_option("--trace", trace_path, "Input trace CSV")->required();
  estimate->add_option("--snapshot", snapshot_path, "Output snapshot JSON")->required();
  estimate->add_option("--config", config_path, "TOML config with [estimator.<kind>] settings");
  estimate->add_option("--resume", resume_path, "Continue from an earlier snapshot");

  auto* sweep = app.add_subcommand("sweep", "Outlier-ratio sweep over all configured estimators");
  sweep->add_option("--config", config_path, "TOML config")->required();
  sweep->add_option("--out", out_path, "Output sweep CSV")->required();
  sweep->add_flag("--fast", fast, "Use the short fast_N trajectories");
  sweep->add_option("--overlay", overlays, "Merge rows from an external sweep CSV");
  sweep->add_option("--trials-out", trials_path, "Also write per-trial results");

  auto* states = app.add_subcommand("states", "Reconstruct states from a snapshot");
  states->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();
  states->add_option("--trace", trace_path, "Input trace CSV")->required();
  states->add_option("--out", out_path, "Output states CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, out_path);
    if (*estimate) return cmd_estimate(kind, trace_path, snapshot_path, config_path, resume_path);
    if (*sweep) return cmd_sweep(config_path, out_path, fast, overlays, trials_path);
    if (*states) return cmd_states(snapshot_path, trace_path, out_path);
  } catch (const airls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
