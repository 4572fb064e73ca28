#pragma once

#include <stdexcept>
#include <string>

namespace reacherbench {

/// Malformed input document (arm file, experiment config, run record).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition on otherwise well-formed data (bad limits, bad range).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Vector/matrix shape disagreement.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// API misuse: stepping a finished episode, stale backward cache, empty buffer.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values where finite arithmetic is required.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Goal region rejection sampling exceeded its cap.
class InfeasibleRegionError : public std::runtime_error {
 public:
  explicit InfeasibleRegionError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or incompatible checkpoint / record file.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace reacherbench
