#pragma once

#include <string>
#include <string_view>

#include "airls/bench.hpp"

namespace airls {

/// Parses a TOML experiment description. Every key is optional; missing keys
/// keep the ExperimentConfig defaults.
///
///   [system]            A, B (arrays of rows), x0, input_std
///   [noise]             mode = "on" | "off", snr, outlier_ratio, outlier_low,
///                       outlier_high, seed
///   [simulate]          N
///   [estimator.NAME]    kind (defaults to NAME), then the kind's settings
///   [sweep]             N, fast_N, trials, seed_base, rmse_window,
///                       ratios = [...] or ratio_min/ratio_max/ratio_points,
///                       estimators = [names] to select and order
///
/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(std::string_view toml_text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

}  // namespace airls
