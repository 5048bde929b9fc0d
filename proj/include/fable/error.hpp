// Error type shared across the fable library.
//
// Every failure the library raises carries a short machine-readable kind
// string ("DimMismatch", "NonFiniteValue", ...) plus a human-readable
// message.  Callers that want to branch on the failure class match on
// kind() instead of parsing what().

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fable {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void raise(std::string kind, const std::string& message) {
  throw Error(std::move(kind), message);
}

}  // namespace fable
