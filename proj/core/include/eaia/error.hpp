#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eaia {

// Every failure the protocol, authority and simulator can report. The names
// are part of the report and CLI output format.
enum class ErrorKind {
  ZeroScalar,
  MalformedPoint,
  MalformedScalar,
  MalformedMessage,
  DegenerateEphemeral,
  RegistrationCheckFailed,
  StaleTimestamp,
  ReplayDetected,
  UnknownPeer,
  SignatureInvalid,
  TagMismatch,
  DuplicateRegistration,
  UnknownPseudonym,
  RidMismatch,
  StateCorrupt,
  DegenerateProbability,
  ScenarioInvalid,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Throws std::invalid_argument for unknown names.
ErrorKind error_kind_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& detail = {});

}  // namespace eaia
