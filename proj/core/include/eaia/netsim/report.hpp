#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eaia/netsim/scenario.hpp"

namespace eaia::netsim {

struct SessionRecord {
  std::size_t index = 0;
  std::string initiator;
  std::string responder;
  double started_ms = 0;
  std::optional<double> completed_ms;
  // "success", an error kind name, "Timeout" or "pending"
  std::string outcome = "pending";
  std::string failed_at;
  bool initiator_key = false;
  bool responder_key = false;
  bool sk_match = false;
};

struct UpdateRecord {
  std::size_t index = 0;
  std::string vehicle;
  double started_ms = 0;
  std::string outcome = "pending";
  bool id_consistent = false;
  bool old_id_retired = false;
};

struct ActionRecord {
  std::size_t index = 0;
  std::size_t rule = 0;
  ActionKind kind = ActionKind::Drop;
  double at_ms = 0;
  std::string type;
  std::string src;
  std::string dst;
  std::optional<std::size_t> session;
  std::string detail;
  // What the manipulated frame led to at its receiver.
  std::string outcome;
};

struct ProbeRecord {
  ProbeKind kind = ProbeKind::RandomSigma;
  std::string target;
  std::string responder;
  unsigned trials = 0;
  std::map<std::string, unsigned> outcomes;

  unsigned accepted() const;
  unsigned rejected() const { return trials - accepted(); }
};

struct KeyRecoveryRecord {
  std::size_t session = 0;
  std::vector<std::string> secrets;
  bool recovered = false;
  std::string path;
};

struct MessageStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;     // lost on the link
  std::uint64_t suppressed = 0;  // removed by the adversary
  std::uint64_t pending = 0;     // still in flight at the stop time
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_delivered = 0;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> by_type;  // count, bytes

  bool balanced() const { return sent == delivered + dropped + suppressed + pending; }
};

struct ExpectationResult {
  Expectation spec;
  std::optional<double> actual;  // unset for unknown metrics
  bool passed = false;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string backend;
  std::uint64_t window_ms = 0;

  std::vector<SessionRecord> sessions;
  std::vector<UpdateRecord> updates;
  std::vector<ActionRecord> actions;
  std::vector<ProbeRecord> probes;
  std::vector<KeyRecoveryRecord> key_recovery;
  MessageStats messages;
  std::map<std::string, std::uint64_t> errors;
  std::uint64_t knowledge_frames = 0;
  std::uint64_t pseudonym_leaks = 0;
  std::uint64_t frames_scanned = 0;
  std::uint64_t zeroization_checks = 0;
  std::uint64_t zeroization_violations = 0;
  double sim_time_ms = 0;
  std::optional<double> wall_time_ms;

  std::vector<ExpectationResult> expectations;

  // Flat name -> value view used by expectations and the CSV summary.
  std::map<std::string, double> metrics() const;
  std::optional<double> metric(const std::string& name) const;

  void evaluate(const std::vector<Expectation>& specs);
  bool passed() const;

  nlohmann::ordered_json to_json() const;
  // Pretty JSON with a trailing newline; byte-identical for identical runs.
  std::string to_json_string() const;
  // kind,name,value,passed (RFC 4180)
  std::string summary_csv() const;
};

}  // namespace eaia::netsim
