#include "robsub/error.hpp"

namespace robsub {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::KMismatch: return "KMismatch";
    case ErrorCode::KMeansFailure: return "KMeansFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace robsub
