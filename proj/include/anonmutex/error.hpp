#pragma once

#include <stdexcept>
#include <string>

namespace anonmutex {

enum class ErrorKind {
  InvalidConfiguration,
  InvalidArgument,
  InvalidEvent,
  ReplayDivergence,
  Protocol,
  SwapPrecondition,
  ExtensionPrecondition,
  ConstructionInvariant,
  SymmetryViolation,
  CapExceeded,
  UnknownQuiescent,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfiguration: return "invalid-configuration";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidEvent: return "invalid-event";
    case ErrorKind::ReplayDivergence: return "replay-divergence";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::SwapPrecondition: return "swap-precondition";
    case ErrorKind::ExtensionPrecondition: return "extension-precondition";
    case ErrorKind::ConstructionInvariant: return "construction-invariant";
    case ErrorKind::SymmetryViolation: return "symmetry-violation";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::UnknownQuiescent: return "unknown-quiescent";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace anonmutex
