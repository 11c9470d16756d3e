#include "airls/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "airls/errors.hpp"

namespace airls {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') {
      field.pop_back();
    }
    out.push_back(field);
  }
  return out;
}

double parse_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("trace: row {}: cannot parse '{}' as a number", row, s));
  }
  return v;
}

void append_vector(std::string& line, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += fmt::format(",{}", v(i));
  }
}

}  // namespace

std::string trace_header(Eigen::Index n, Eigen::Index n_u) {
  std::string h = "t";
  for (Eigen::Index i = 1; i <= n; ++i) h += fmt::format(",x{}", i);
  for (Eigen::Index i = 1; i <= n_u; ++i) h += fmt::format(",u{}", i);
  for (Eigen::Index i = 1; i <= n; ++i) h += fmt::format(",x{}_next", i);
  for (Eigen::Index i = 1; i <= n; ++i) h += fmt::format(",x{}_noisy", i);
  for (Eigen::Index i = 1; i <= n_u; ++i) h += fmt::format(",u{}_noisy", i);
  for (Eigen::Index i = 1; i <= n; ++i) h += fmt::format(",x{}_next_noisy", i);
  h += ",is_outlier";
  return h;
}

void write_trace(std::ostream& out, const std::vector<TrajectorySample>& trace) {
  if (trace.empty()) {
    throw ConfigError("trace: nothing to write");
  }
  out << trace_header(trace.front().x.size(), trace.front().u.size()) << '\n';
  std::string line;
  for (const auto& s : trace) {
    line = fmt::format("{}", s.t);
    append_vector(line, s.x);
    append_vector(line, s.u);
    append_vector(line, s.x_next);
    append_vector(line, s.x_noisy);
    append_vector(line, s.u_noisy);
    append_vector(line, s.x_next_noisy);
    line += s.is_outlier ? ",1\n" : ",0\n";
    out << line;
  }
}

void write_trace(const std::string& path, const std::vector<TrajectorySample>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("trace: cannot open '" + path + "' for writing");
  }
  write_trace(out, trace);
}

std::vector<TrajectorySample> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("trace: empty input");
  }
  const auto cols = split(line);
  // Layout is t + 3n + n_u true + 3n + n_u measured + flag = 6n + 2n_u + 2.
  Eigen::Index n = 0;
  Eigen::Index n_u = 0;
  for (const auto& c : cols) {
    if (c.size() > 1 && c[0] == 'x' && c.find('_') == std::string::npos) ++n;
    if (c.size() > 1 && c[0] == 'u' && c.find('_') == std::string::npos) ++n_u;
  }
  if (n == 0 || cols.empty() || cols.front() != "t" || cols.back() != "is_outlier" ||
      trace_header(n, n_u) != line.substr(0, line.find_last_not_of('\r') + 1)) {
    throw ConfigError("trace: unexpected header '" + line + "'");
  }
  const std::size_t width = cols.size();

  std::vector<TrajectorySample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto f = split(line);
    if (f.size() != width) {
      throw ConfigError(fmt::format("trace: row {} has {} fields, expected {}", row, f.size(), width));
    }
    std::size_t k = 0;
    auto take = [&](Eigen::Index len) {
      Eigen::VectorXd v(len);
      for (Eigen::Index i = 0; i < len; ++i) v(i) = parse_double(f[k++], row);
      return v;
    };
    TrajectorySample s;
    s.t = static_cast<std::int64_t>(parse_double(f[k++], row));
    s.x = take(n);
    s.u = take(n_u);
    s.x_next = take(n);
    s.x_noisy = take(n);
    s.u_noisy = take(n_u);
    s.x_next_noisy = take(n);
    const std::string& flag = f[k];
    if (flag != "0" && flag != "1") {
      throw ConfigError(fmt::format("trace: row {}: is_outlier must be 0 or 1", row));
    }
    s.is_outlier = flag == "1";
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    throw ConfigError("trace: no samples");
  }
  return out;
}

std::vector<TrajectorySample> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("trace: cannot open '" + path + "'");
  }
  return read_trace(in);
}

}  // namespace airls
