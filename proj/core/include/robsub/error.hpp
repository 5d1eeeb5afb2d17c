#pragma once

#include <stdexcept>
#include <string>

namespace robsub {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  TooLarge,
  NotPSD,
  SolverFailure,
  InvalidParams,
  EmptyCluster,
  KMismatch,
  KMeansFailure,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace robsub
