#pragma once

#include <stdexcept>
#include <string>

namespace pingpong {

// Thrown when an argument violates an operation's precondition. The message
// names the violated condition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A session hit ProtocolConfig::max_rounds before all message bits were
// delivered.
class RoundLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw PreconditionError(what);
}

}  // namespace pingpong
