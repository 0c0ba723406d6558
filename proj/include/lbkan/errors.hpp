#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbkan {

// Bad argument values or dimension mismatches at an API boundary.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke a documented precondition (stale cache, integration fault).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configuration errors; the offending key is carried separately so the CLI
// can report it.
class UsageError : public std::invalid_argument {
 public:
  UsageError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Every Monte Carlo candidate diverged.
class McFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lbkan
