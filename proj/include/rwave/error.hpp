#pragma once

#include <stdexcept>
#include <string>

namespace rwave {

/// Input outside the accepted domain (e.g. a point outside the unit square).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The tree or a page violated a structural invariant.
class CorruptionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The buffer pool cannot make room (every frame is pinned).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Page store I/O failure or unknown page id.
class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration field failed validation. `field()` names it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace rwave
