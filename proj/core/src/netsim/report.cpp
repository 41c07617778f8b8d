#include "eaia/netsim/report.hpp"

#include <cmath>

#include "eaia/costmodel/table.hpp"

namespace eaia::netsim {

namespace {

// Metrics under these prefixes count occurrences, so an absent entry is 0.
bool counted_prefix(const std::string& name) {
  for (const char* p : {"errors.", "sessions.outcome.", "probes."}) {
    if (name.rfind(p, 0) == 0) return true;
  }
  return false;
}

std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Ge: return "ge";
    case CompareOp::Le: return "le";
  }
  return "eq";
}

}  // namespace

unsigned ProbeRecord::accepted() const {
  const auto it = outcomes.find("accepted");
  return it == outcomes.end() ? 0 : it->second;
}

std::map<std::string, double> RunReport::metrics() const {
  std::map<std::string, double> m;
  double ok = 0, matched = 0, timed_out = 0, failed = 0;
  for (const auto& s : sessions) {
    m["sessions.outcome." + s.outcome] += 1;
    if (s.outcome == "success") ++ok;
    if (s.sk_match) ++matched;
    if (s.outcome == "Timeout") ++timed_out;
    if (s.outcome != "success" && s.outcome != "Timeout" && s.outcome != "pending") ++failed;
  }
  m["sessions.total"] = static_cast<double>(sessions.size());
  m["sessions.succeeded"] = ok;
  m["sessions.sk_match"] = matched;
  m["sessions.failed"] = failed;
  m["sessions.timed_out"] = timed_out;

  double upd_ok = 0, upd_consistent = 0, upd_retired = 0;
  for (const auto& u : updates) {
    if (u.outcome == "success") ++upd_ok;
    if (u.id_consistent) ++upd_consistent;
    if (u.old_id_retired) ++upd_retired;
  }
  m["updates.total"] = static_cast<double>(updates.size());
  m["updates.succeeded"] = upd_ok;
  m["updates.id_consistent"] = upd_consistent;
  m["updates.old_id_retired"] = upd_retired;

  for (const auto& [kind, n] : errors) m["errors." + kind] = static_cast<double>(n);

  m["messages.sent"] = static_cast<double>(messages.sent);
  m["messages.delivered"] = static_cast<double>(messages.delivered);
  m["messages.dropped"] = static_cast<double>(messages.dropped);
  m["messages.suppressed"] = static_cast<double>(messages.suppressed);
  m["messages.pending"] = static_cast<double>(messages.pending);
  m["messages.bytes_sent"] = static_cast<double>(messages.bytes_sent);
  m["accounting.balanced"] = messages.balanced() ? 1 : 0;

  double unresolved = 0;
  for (const auto& a : actions) {
    if (a.outcome.empty()) ++unresolved;
    m["adversary." + std::string(to_string(a.kind))] += 1;
  }
  m["adversary.actions"] = static_cast<double>(actions.size());
  m["adversary.unresolved"] = unresolved;
  double recovered = 0;
  for (const auto& k : key_recovery) recovered += k.recovered ? 1 : 0;
  m["adversary.key_attempts"] = static_cast<double>(key_recovery.size());
  m["adversary.sk_recovered"] = recovered;

  for (const auto& p : probes) {
    const std::string base = "probes." + std::string(to_string(p.kind)) + ".";
    m[base + "trials"] += p.trials;
    m[base + "accepted"] += p.accepted();
    m[base + "rejected"] += p.rejected();
    for (const auto& [o, n] : p.outcomes) {
      if (o != "accepted") m[base + o] += n;
    }
  }

  m["privacy.pseudonym_leaks"] = static_cast<double>(pseudonym_leaks);
  m["privacy.frames_scanned"] = static_cast<double>(frames_scanned);
  m["zeroization.checks"] = static_cast<double>(zeroization_checks);
  m["zeroization.violations"] = static_cast<double>(zeroization_violations);
  return m;
}

std::optional<double> RunReport::metric(const std::string& name) const {
  const auto m = metrics();
  const auto it = m.find(name);
  if (it != m.end()) return it->second;
  if (counted_prefix(name)) return 0.0;
  return std::nullopt;
}

void RunReport::evaluate(const std::vector<Expectation>& specs) {
  expectations.clear();
  for (const auto& e : specs) {
    ExpectationResult r;
    r.spec = e;
    r.actual = metric(e.metric);
    if (r.actual) {
      switch (e.op) {
        case CompareOp::Eq: r.passed = std::abs(*r.actual - e.value) < 1e-9; break;
        case CompareOp::Ge: r.passed = *r.actual >= e.value; break;
        case CompareOp::Le: r.passed = *r.actual <= e.value; break;
      }
    }
    expectations.push_back(r);
  }
}

bool RunReport::passed() const {
  for (const auto& e : expectations) {
    if (!e.passed) return false;
  }
  return true;
}

nlohmann::ordered_json RunReport::to_json() const {
  using oj = nlohmann::ordered_json;
  oj j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["backend"] = backend;
  j["window_ms"] = window_ms;

  oj s = oj::array();
  for (const auto& r : sessions) {
    oj e;
    e["index"] = r.index;
    e["initiator"] = r.initiator;
    e["responder"] = r.responder;
    e["started_ms"] = r.started_ms;
    e["completed_ms"] = r.completed_ms ? oj(*r.completed_ms) : oj(nullptr);
    e["outcome"] = r.outcome;
    e["failed_at"] = r.failed_at.empty() ? oj(nullptr) : oj(r.failed_at);
    e["initiator_key"] = r.initiator_key;
    e["responder_key"] = r.responder_key;
    e["sk_match"] = r.sk_match;
    s.push_back(e);
  }
  j["sessions"] = s;

  oj u = oj::array();
  for (const auto& r : updates) {
    u.push_back({{"index", r.index},
                 {"vehicle", r.vehicle},
                 {"started_ms", r.started_ms},
                 {"outcome", r.outcome},
                 {"id_consistent", r.id_consistent},
                 {"old_id_retired", r.old_id_retired}});
  }
  j["updates"] = u;

  oj msg;
  msg["sent"] = messages.sent;
  msg["delivered"] = messages.delivered;
  msg["dropped"] = messages.dropped;
  msg["suppressed"] = messages.suppressed;
  msg["pending"] = messages.pending;
  msg["balanced"] = messages.balanced();
  msg["bytes_sent"] = messages.bytes_sent;
  msg["bytes_delivered"] = messages.bytes_delivered;
  oj by_type = oj::object();
  for (const auto& [t, cb] : messages.by_type) by_type[t] = {{"count", cb.first}, {"bytes", cb.second}};
  msg["by_type"] = by_type;
  j["messages"] = msg;

  oj err = oj::object();
  for (const auto& [k, n] : errors) err[k] = n;
  j["errors"] = err;

  oj adv;
  oj acts = oj::array();
  for (const auto& a : actions) {
    oj e;
    e["index"] = a.index;
    e["rule"] = a.rule;
    e["action"] = to_string(a.kind);
    e["at_ms"] = a.at_ms;
    e["type"] = a.type;
    e["src"] = a.src;
    e["dst"] = a.dst;
    e["session"] = a.session ? oj(*a.session) : oj(nullptr);
    e["detail"] = a.detail;
    e["outcome"] = a.outcome;
    acts.push_back(e);
  }
  adv["actions"] = acts;
  adv["knowledge_frames"] = knowledge_frames;
  oj kr = oj::array();
  for (const auto& k : key_recovery) {
    kr.push_back({{"session", k.session}, {"secrets", k.secrets}, {"recovered", k.recovered}, {"path", k.path}});
  }
  adv["key_recovery"] = kr;
  j["adversary"] = adv;

  oj pr = oj::array();
  for (const auto& p : probes) {
    oj outcomes = oj::object();
    for (const auto& [o, n] : p.outcomes) outcomes[o] = n;
    pr.push_back({{"kind", to_string(p.kind)},
                  {"target", p.target},
                  {"responder", p.responder},
                  {"trials", p.trials},
                  {"accepted", p.accepted()},
                  {"rejected", p.rejected()},
                  {"outcomes", outcomes}});
  }
  j["probes"] = pr;

  j["checks"] = {{"accounting_balanced", messages.balanced()},
                 {"frames_scanned", frames_scanned},
                 {"pseudonym_leaks", pseudonym_leaks},
                 {"zeroization_checks", zeroization_checks},
                 {"zeroization_violations", zeroization_violations}};

  oj ex = oj::array();
  for (const auto& e : expectations) {
    ex.push_back({{"name", e.spec.name},
                  {"metric", e.spec.metric},
                  {"op", op_symbol(e.spec.op)},
                  {"value", e.spec.value},
                  {"actual", e.actual ? oj(*e.actual) : oj(nullptr)},
                  {"passed", e.passed}});
  }
  j["expectations"] = ex;

  const auto m = metrics();
  j["summary"] = {{"sessions", m.at("sessions.total")},
                  {"succeeded", m.at("sessions.succeeded")},
                  {"sk_match", m.at("sessions.sk_match")},
                  {"failed", m.at("sessions.failed")},
                  {"timed_out", m.at("sessions.timed_out")},
                  {"expectations_passed", passed()}};
  j["sim_time_ms"] = sim_time_ms;
  if (wall_time_ms) j["wall_time_ms"] = *wall_time_ms;
  return j;
}

std::string RunReport::to_json_string() const { return to_json().dump(2) + "\n"; }

std::string RunReport::summary_csv() const {
  cost::Table t({"kind", "name", "value", "passed"});
  for (const auto& [name, v] : metrics()) t.add_row({"metric", name, v, nullptr});
  for (const auto& e : expectations) {
    t.add_row({"expectation", e.spec.name, e.actual ? nlohmann::json(*e.actual) : nlohmann::json(),
               e.passed});
  }
  return t.to_csv();
}

}  // namespace eaia::netsim
