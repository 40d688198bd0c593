#pragma once

#include <stdexcept>
#include <string>

namespace wgff {

/// Contract violation on inputs (bad parameters, malformed graphs, points outside their domain).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot proceed on valid-looking inputs (singular systems, unreachable vertices).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace wgff
