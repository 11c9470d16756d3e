#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "airls/system.hpp"

namespace airls {

/// Trace CSV columns, one row per sample:
///   t, x1..xn, u1..unu, x1_next..xn_next,
///   x1_noisy..xn_noisy, u1_noisy..unu_noisy, x1_next_noisy..xn_next_noisy,
///   is_outlier (0/1)
std::string trace_header(Eigen::Index n, Eigen::Index n_u);

void write_trace(std::ostream& out, const std::vector<TrajectorySample>& trace);
void write_trace(const std::string& path, const std::vector<TrajectorySample>& trace);

/// Parses a trace written by write_trace; n and n_u are inferred from the
/// header. Throws ConfigError on malformed input.
std::vector<TrajectorySample> read_trace(std::istream& in);
std::vector<TrajectorySample> read_trace(const std::string& path);

}  // namespace airls
