#pragma once

#include <stdexcept>
#include <string>

namespace cropguard {

/// Bad argument to a model or planner operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Link distance beyond the radio's maximum range.
class LinkOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Path-loss regression with no spread in distance.
class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tree construction failed; carries the offending node when known.
class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, int node_id = -1)
      : std::runtime_error(what), node_id_(node_id) {}
  [[nodiscard]] int node_id() const noexcept { return node_id_; }

 private:
  int node_id_;
};

class NotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Latency requested for a delivery that never completed.
class UndefinedLatency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cropguard
