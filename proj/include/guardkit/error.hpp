#pragma once

#include <stdexcept>
#include <string>

namespace guardkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a type invariant (bad sample, duplicate taxonomy code, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: unreadable asset, invalid regex, out-of-range threshold.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A template references a slot that has no value for the given sample.
class UnboundSlot : public Error {
 public:
  explicit UnboundSlot(std::string slot)
      : Error("unbound template slot {" + slot + "}"), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

}  // namespace guardkit
