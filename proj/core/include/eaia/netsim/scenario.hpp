#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eaia/bytes.hpp"
#include "eaia/protocol/wire.hpp"

namespace eaia::netsim {

inline constexpr const char* kAuthorityNode = "AMF";
inline constexpr const char* kAdversaryNode = "ADV";

struct LinkConfig {
  double rate_bps = 25e6;
  double distance_m = 200.0;
  double jitter_us = 0;  // uniform extra delay in [0, jitter_us]
  double loss = 0;       // independent drop probability per frame
};

// One authentication between two vehicles. The responder opens with an
// AuthRequest; the initiator answers with the challenge and finalizes.
struct SessionSpec {
  double at_ms = 0;
  std::string initiator;
  std::string responder;
};

struct UpdateSpec {
  double at_ms = 0;
  std::string vehicle;
};

enum class ActionKind { Drop, Tamper, Replay, Inject, MitmSwap };

std::string_view to_string(ActionKind kind);

// Frame selector for adversary rules. Unset fields match anything.
struct FrameMatch {
  std::optional<protocol::MessageType> type;
  std::optional<std::string> src;
  std::optional<std::string> dst;
  std::optional<std::size_t> session;
  unsigned skip = 0;   // let this many matching frames pass first
  unsigned count = 1;  // applications; 0 means every match
};

struct AdversaryRule {
  ActionKind kind = ActionKind::Drop;
  FrameMatch match;
  // tamper: field name and bit offset inside the field (random if unset)
  std::string field;
  std::optional<std::size_t> bit;
  // replay: extra delay before the copy is re-delivered
  double delay_ms = 0;
  // inject: explicit bytes or a random buffer of the given length
  double at_ms = 0;
  std::string dst;
  Bytes bytes;
  std::size_t random_length = 0;
};

// Secrets handed to the adversary after the run, for the key-recovery
// attempt.
struct Compromise {
  std::string vehicle;  // long-term (x, y) of this vehicle
};

struct EphemeralLeak {
  std::size_t session = 0;
  std::string secret;  // "a" or "b"
};

enum class ProbeKind { RandomSigma, ReuseSigma, PositiveControl };

std::string_view to_string(ProbeKind kind);

struct ProbeSpec {
  ProbeKind kind = ProbeKind::RandomSigma;
  std::string target;     // vehicle being impersonated
  std::string responder;  // vehicle receiving the forged challenge
  unsigned trials = 1;
};

enum class CompareOp { Eq, Ge, Le };

struct Expectation {
  std::string name;
  std::string metric;
  CompareOp op = CompareOp::Eq;
  double value = 0;
};

struct Scenario {
  std::string name;
  std::string description;
  std::uint64_t seed = 1;
  std::string backend = "toy";
  std::uint64_t window_ms = 500;
  LinkConfig link;
  std::vector<std::string> vehicles;
  std::vector<SessionSpec> sessions;
  std::vector<UpdateSpec> updates;
  std::vector<AdversaryRule> rules;
  std::vector<Compromise> compromises;
  std::vector<EphemeralLeak> leaks;
  std::vector<ProbeSpec> probes;
  std::optional<double> stop_ms;
  std::vector<Expectation> expectations;

  // Throws ScenarioInvalid on dangling names or out-of-range values.
  void validate() const;
};

// Strict parse: unknown keys and wrong types raise ScenarioInvalid.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::ordered_json scenario_to_json(const Scenario& sc);

}  // namespace eaia::netsim
