#pragma once

#include <stdexcept>

namespace vln {

// Base class for all recoverable library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown waypoint, object, or key.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Search-tree structural violation (node missing, link inconsistency).
class StructureError : public Error {
 public:
  using Error::Error;
};

// No path exists between two waypoints.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Invalid runtime configuration, rejected at startup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Agent backend failure surfaced after retries were exhausted.
class AgentError : public Error {
 public:
  using Error::Error;
};

}  // namespace vln
