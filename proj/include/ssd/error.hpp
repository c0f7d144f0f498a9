#pragma once

#include <stdexcept>
#include <string>

namespace ssd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or model data. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Zero-length segment, singular linear system or otherwise unusable mesh.
class DegenerateMesh : public Error {
 public:
  using Error::Error;
};

// File system or format problem. CLI exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

// Run aborted after exhausting step retries. CLI exit code 3.
class SolverAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace ssd
