#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bitgrip {

enum class ErrorCode {
  InvalidArgument,
  KindMismatch,
  EmptyPile,
  OverCapacity,
  InvalidTarget,
  ScaleUnstableTimeout,
  EmptyInput,
  DockOccupied,
  DockEmpty,
  UnknownDock,
  UnknownAssembly,
  NotFaulted,
  IllegalTransition,
  UnknownFood,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. All recoverable failures in
/// the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bitgrip
