#pragma once

#include <stdexcept>
#include <string>

namespace evsg {

// Error classes map 1:1 onto CLI exit codes (see cli/cli.hpp):
//   ConfigError   -> 2   bad configuration, unresolvable paths, missing env
//   DataError     -> 3   malformed inputs, violated invariants, parse failures
//   EndpointError -> 4   transport failures, non-2xx responses, empty completions
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

class EndpointError : public Error {
 public:
  EndpointError(const std::string& msg, int status = 0)
      : Error(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace evsg
