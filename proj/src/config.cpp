#include "airls/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "airls/errors.hpp"
#include "tomlplusplus/toml.hpp"

namespace airls {

namespace {

class Section {
 public:
  Section(const toml::table& table, std::string path, std::set<std::string> allowed)
      : table_(table), path_(std::move(path)), allowed_(std::move(allowed)) {
    for (const auto& [key, node] : table_) {
      if (!allowed_.count(std::string(key.str()))) {
        throw ConfigError(fmt::format("{}: unknown key '{}'", path_, key.str()));
      }
    }
  }

  const toml::node* get(const char* key) const { return table_.get(key); }

  void number(const char* key, double& out) const {
    if (const auto* node = get(key)) {
      if (auto v = node->value<double>()) {
        out = *v;
      } else {
        throw ConfigError(fmt::format("{}.{}: expected a number", path_, key));
      }
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) const {
    if (const auto* node = get(key)) {
      const auto* v = node->as_integer();
      if (v == nullptr) {
        throw ConfigError(fmt::format("{}.{}: expected an integer", path_, key));
      }
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->get() < 0) {
          throw ConfigError(fmt::format("{}.{}: must be non-negative", path_, key));
        }
      }
      out = static_cast<Int>(v->get());
    }
  }

  void boolean(const char* key, bool& out) const {
    if (const auto* node = get(key)) {
      const auto* v = node->as_boolean();
      if (v == nullptr) {
        throw ConfigError(fmt::format("{}.{}: expected true or false", path_, key));
      }
      out = v->get();
    }
  }

  void string(const char* key, std::string& out) const {
    if (const auto* node = get(key)) {
      const auto* v = node->as_string();
      if (v == nullptr) {
        throw ConfigError(fmt::format("{}.{}: expected a string", path_, key));
      }
      out = v->get();
    }
  }

  std::vector<double> numbers(const char* key) const {
    const auto* arr = get(key)->as_array();
    if (arr == nullptr) {
      throw ConfigError(fmt::format("{}.{}: expected an array of numbers", path_, key));
    }
    std::vector<double> out;
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      if (!v) {
        throw ConfigError(fmt::format("{}.{}: expected an array of numbers", path_, key));
      }
      out.push_back(*v);
    }
    return out;
  }

  Eigen::MatrixXd matrix(const char* key) const {
    const auto* arr = get(key)->as_array();
    if (arr == nullptr || arr->empty()) {
      throw ConfigError(fmt::format("{}.{}: expected a non-empty array of rows", path_, key));
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row_node : *arr) {
      const auto* row = row_node.as_array();
      if (row == nullptr) {
        throw ConfigError(fmt::format("{}.{}: every row must be an array", path_, key));
      }
      std::vector<double> r;
      for (const auto& el : *row) {
        auto v = el.value<double>();
        if (!v) {
          throw ConfigError(fmt::format("{}.{}: entries must be numbers", path_, key));
        }
        r.push_back(*v);
      }
      if (r.empty() || (!rows.empty() && r.size() != rows.front().size())) {
        throw ConfigError(fmt::format("{}.{}: rows must be non-empty and of equal length", path_, key));
      }
      rows.push_back(std::move(r));
    }
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return M;
  }

  const std::string& path() const { return path_; }

 private:
  const toml::table& table_;
  std::string path_;
  std::set<std::string> allowed_;
};

const toml::table* subtable(const toml::table& root, const char* key) {
  const auto* node = root.get(key);
  if (node == nullptr) {
    return nullptr;
  }
  if (!node->is_table()) {
    throw ConfigError(fmt::format("[{}] must be a table", key));
  }
  return node->as_table();
}

void read_system(const toml::table& t, ExperimentConfig& cfg) {
  Section s(t, "system", {"A", "B", "x0", "input_std"});
  Eigen::MatrixXd A = cfg.system.A;
  Eigen::MatrixXd B = cfg.system.B;
  if (s.get("A")) A = s.matrix("A");
  if (s.get("B")) B = s.matrix("B");
  try {
    cfg.system = LinearSystem(A, B);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  if (s.get("x0")) {
    const auto v = s.numbers("x0");
    cfg.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  } else if (cfg.x0.size() != cfg.system.n()) {
    cfg.x0 = Eigen::VectorXd::Zero(cfg.system.n());
  }
  s.number("input_std", cfg.input_std);
}

void read_noise(const toml::table& t, ExperimentConfig& cfg) {
  Section s(t, "noise", {"mode", "snr", "outlier_ratio", "outlier_low", "outlier_high", "seed"});
  std::string mode = cfg.noise.enabled ? "on" : "off";
  s.string("mode", mode);
  if (mode != "on" && mode != "off") {
    throw ConfigError("noise.mode: expected \"on\" or \"off\"");
  }
  cfg.noise.enabled = mode == "on";
  s.number("snr", cfg.noise.snr);
  s.number("outlier_ratio", cfg.noise.outlier_ratio);
  s.number("outlier_low", cfg.noise.outlier_low);
  s.number("outlier_high", cfg.noise.outlier_high);
  s.integer("seed", cfg.noise.seed);
}

EstimatorSpec read_estimator(const std::string& name, const toml::table& t) {
  std::string kind = name;
  if (const auto* k = t.get("kind")) {
    if (!k->is_string()) {
      throw ConfigError(fmt::format("estimator.{}.kind: expected a string", name));
    }
    kind = k->as_string()->get();
  }
  EstimatorSpec spec = EstimatorSpec::named(kind);
  spec.name = name;
  const std::string path = "estimator." + name;
  if (kind == "airls") {
    Section s(t, path,
              {"kind", "beta", "alpha", "K", "L_Z", "L_Theta", "psi", "ridge_fallback", "ridge_eps", "c0_scale",
               "point_iters"});
    s.number("beta", spec.airls.beta);
    s.number("alpha", spec.airls.alpha);
    s.integer("K", spec.airls.K);
    s.integer("L_Z", spec.airls.L_Z);
    s.integer("L_Theta", spec.airls.L_Theta);
    s.number("psi", spec.psi_scale);
    s.boolean("ridge_fallback", spec.airls.ridge_fallback);
    s.number("ridge_eps", spec.airls.ridge_eps);
    s.number("c0_scale", spec.airls.c0_scale);
    s.integer("point_iters", spec.airls.point_iters);
  } else if (kind == "rtls") {
    Section s(t, path, {"kind", "beta", "power_iters", "c0_scale", "jitter"});
    s.number("beta", spec.rtls.beta);
    s.integer("power_iters", spec.rtls.power_iters);
    s.number("c0_scale", spec.rtls.c0_scale);
    s.number("jitter", spec.rtls.jitter);
  } else if (kind == "rls") {
    Section s(t, path, {"kind", "beta", "delta", "jitter"});
    s.number("beta", spec.rls.beta);
    s.number("delta", spec.rls.delta);
    s.number("jitter", spec.rls.jitter);
  } else {
    throw ConfigError(fmt::format("{}.kind: unknown estimator kind '{}'", path, kind));
  }
  return spec;
}

void read_sweep(const toml::table& t, ExperimentConfig& cfg, std::vector<std::string>& order) {
  Section s(t, "sweep",
            {"N", "fast_N", "trials", "seed_base", "rmse_window", "ratios", "ratio_min", "ratio_max",
             "ratio_points", "estimators"});
  s.integer("N", cfg.N);
  s.integer("fast_N", cfg.fast_N);
  s.integer("trials", cfg.trials);
  s.integer("seed_base", cfg.seed_base);
  s.integer("rmse_window", cfg.rmse_window);
  const bool has_grid = s.get("ratio_min") || s.get("ratio_max") || s.get("ratio_points");
  if (s.get("ratios") && has_grid) {
    throw ConfigError("sweep: give either ratios or ratio_min/ratio_max/ratio_points, not both");
  }
  if (s.get("ratios")) {
    cfg.ratios = s.numbers("ratios");
  } else if (has_grid) {
    double lo = 1e-4;
    double hi = 5e-2;
    int points = 20;
    s.number("ratio_min", lo);
    s.number("ratio_max", hi);
    s.integer("ratio_points", points);
    cfg.ratios = log_spaced(lo, hi, points);
  }
  if (const auto* node = s.get("estimators")) {
    const auto* arr = node->as_array();
    if (arr == nullptr) {
      throw ConfigError("sweep.estimators: expected an array of names");
    }
    for (const auto& el : *arr) {
      if (!el.is_string()) {
        throw ConfigError("sweep.estimators: expected an array of names");
      }
      order.push_back(el.as_string()->get());
    }
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e;
    throw ConfigError(msg.str());
  }
  for (const auto& [key, node] : root) {
    static const std::set<std::string> known{"system", "noise", "simulate", "estimator", "sweep"};
    if (!known.count(std::string(key.str()))) {
      throw ConfigError(fmt::format("{}: unknown section [{}]", source, key.str()));
    }
  }

  ExperimentConfig cfg;
  if (const auto* t = subtable(root, "system")) read_system(*t, cfg);
  if (const auto* t = subtable(root, "noise")) read_noise(*t, cfg);
  if (const auto* t = subtable(root, "simulate")) {
    Section s(*t, "simulate", {"N"});
    s.integer("N", cfg.simulate_N);
  }

  std::vector<EstimatorSpec> defined;
  if (const auto* t = subtable(root, "estimator")) {
    for (const auto& [key, node] : *t) {
      if (!node.is_table()) {
        throw ConfigError(fmt::format("[estimator.{}] must be a table", key.str()));
      }
      defined.push_back(read_estimator(std::string(key.str()), *node.as_table()));
    }
  }

  std::vector<std::string> order;
  if (const auto* t = subtable(root, "sweep")) read_sweep(*t, cfg, order);

  // Configured tables override the built-in defaults of the same name.
  for (auto& spec : defined) {
    bool replaced = false;
    for (auto& existing : cfg.estimators) {
      if (existing.name == spec.name) {
        existing = spec;
        replaced = true;
      }
    }
    if (!replaced) cfg.estimators.push_back(spec);
  }
  if (!order.empty()) {
    std::vector<EstimatorSpec> selected;
    for (const auto& name : order) {
      const EstimatorSpec* spec = cfg.find_estimator(name);
      if (spec == nullptr) {
        throw ConfigError("sweep.estimators: no estimator named '" + name + "'");
      }
      selected.push_back(*spec);
    }
    cfg.estimators = std::move(selected);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace airls
