#include "eaia/error.hpp"

#include <array>
#include <utility>

namespace eaia {

namespace {

constexpr std::array<std::pair<ErrorKind, std::string_view>, 18> kNames{{
    {ErrorKind::ZeroScalar, "ZeroScalar"},
    {ErrorKind::MalformedPoint, "MalformedPoint"},
    {ErrorKind::MalformedScalar, "MalformedScalar"},
    {ErrorKind::MalformedMessage, "MalformedMessage"},
    {ErrorKind::DegenerateEphemeral, "DegenerateEphemeral"},
    {ErrorKind::RegistrationCheckFailed, "RegistrationCheckFailed"},
    {ErrorKind::StaleTimestamp, "StaleTimestamp"},
    {ErrorKind::ReplayDetected, "ReplayDetected"},
    {ErrorKind::UnknownPeer, "UnknownPeer"},
    {ErrorKind::SignatureInvalid, "SignatureInvalid"},
    {ErrorKind::TagMismatch, "TagMismatch"},
    {ErrorKind::DuplicateRegistration, "DuplicateRegistration"},
    {ErrorKind::UnknownPseudonym, "UnknownPseudonym"},
    {ErrorKind::RidMismatch, "RidMismatch"},
    {ErrorKind::StateCorrupt, "StateCorrupt"},
    {ErrorKind::DegenerateProbability, "DegenerateProbability"},
    {ErrorKind::ScenarioInvalid, "ScenarioInvalid"},
    {ErrorKind::InvalidArgument, "InvalidArgument"},
}};

std::string compose(ErrorKind kind, const std::string& detail) {
  std::string msg(to_string(kind));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

ErrorKind error_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown error kind: " + std::string(name));
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(compose(kind, detail)), kind_(kind) {}

void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

}  // namespace eaia
