#pragma once

#include <stdexcept>
#include <string>

namespace airls {

/// Input shapes do not agree.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A normal matrix X^T W X is too badly conditioned to invert.
class SingularNormalMatrix : public std::runtime_error {
 public:
  explicit SingularNormalMatrix(const std::string& what) : std::runtime_error(what) {}
};

/// A correlation matrix could not be factored even after jitter.
class SingularMatrix : public std::runtime_error {
 public:
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

class InvalidBounds : public std::invalid_argument {
 public:
  explicit InvalidBounds(const std::string& what) : std::invalid_argument(what) {}
};

class ZeroTruth : public std::invalid_argument {
 public:
  explicit ZeroTruth(const std::string& what) : std::invalid_argument(what) {}
};

/// Configuration file or command-line settings are invalid.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace airls
