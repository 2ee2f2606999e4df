#pragma once

#include <stdexcept>
#include <string>

namespace flagflow {

enum class ErrorCode {
  ClusterAmbiguity,
  NotHyperbolic,
  NoPositiveRoot,
  SpecMismatch,
  NonSquareInput,
  InvalidElement,
  SingularBasis,
  InvalidFlagType,
  NotOnComponent,
  InconsistentProfile,
  EmptyFiber,
  StepTooCoarse,
  DimensionTooLarge,
  InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NonSquareInput: return "NonSquareInput";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::InvalidFlagType: return "InvalidFlagType";
    case ErrorCode::NotOnComponent: return "NotOnComponent";
    case ErrorCode::InconsistentProfile: return "InconsistentProfile";
    case ErrorCode::EmptyFiber: return "EmptyFiber";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace flagflow
