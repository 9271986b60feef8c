#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wpt {

enum class ErrorCode {
  InvalidArgument,
  CutLocus,
  ConjugatePoint,
  ResolutionMismatch,
  SizeCapExceeded,
  NotFound,
  BaseMismatch,
  SolverDiverged,
  MapDegenerate,
  NotContractive,
  MaxIterations,
  UnknownCommand,
  ConfigParse,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (and the CLI
// exit-status mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CutLocus: return "CutLocus";
    case ErrorCode::ConjugatePoint: return "ConjugatePoint";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::MapDegenerate: return "MapDegenerate";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

}  // namespace wpt
