#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zooguide {

enum class ErrorCode {
  ChecksumMismatch,
  MalformedField,
  InsufficientPoints,
  DegenerateGeometry,
  MissingFile,
  SchemaViolation,
  BrokenReference,
  CalibrationMismatch,
  UnknownHotspot,
  ScriptInvalid,
  ConfigInvalid,
  NotReady,
  InvalidState,
  SessionClosed,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::MalformedField: return "MalformedField";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::BrokenReference: return "BrokenReference";
    case ErrorCode::CalibrationMismatch: return "CalibrationMismatch";
    case ErrorCode::UnknownHotspot: return "UnknownHotspot";
    case ErrorCode::ScriptInvalid: return "ScriptInvalid";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NotReady: return "NotReady";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base exception for every failure the library reports. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zooguide
