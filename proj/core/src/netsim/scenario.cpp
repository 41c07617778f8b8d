#include "eaia/netsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "eaia/error.hpp"

namespace eaia::netsim {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::ScenarioInvalid, what); }

// Rejects keys outside the allowed set.
void check_keys(const nlohmann::json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) invalid(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(where + ": wrong type for '" + key + "'");
  }
}

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

protocol::MessageType parse_type(const std::string& name, const std::string& where) {
  using protocol::MessageType;
  for (MessageType t : {MessageType::AuthRequest, MessageType::Challenge, MessageType::Response,
                        MessageType::PseudonymUpdateRequest, MessageType::PseudonymUpdateReply}) {
    if (name == protocol::to_string(t)) return t;
  }
  if (name == "Challenge") return MessageType::Challenge;
  if (name == "Response") return MessageType::Response;
  invalid(where + ": unknown message type '" + name + "'");
}

ActionKind parse_action(const std::string& name, const std::string& where) {
  for (ActionKind k : {ActionKind::Drop, ActionKind::Tamper, ActionKind::Replay, ActionKind::Inject,
                       ActionKind::MitmSwap}) {
    if (name == to_string(k)) return k;
  }
  invalid(where + ": unknown action '" + name + "'");
}

ProbeKind parse_probe(const std::string& name, const std::string& where) {
  for (ProbeKind k : {ProbeKind::RandomSigma, ProbeKind::ReuseSigma, ProbeKind::PositiveControl}) {
    if (name == to_string(k)) return k;
  }
  invalid(where + ": unknown probe '" + name + "'");
}

CompareOp parse_op(const std::string& op, const std::string& where) {
  if (op == "eq" || op == "==") return CompareOp::Eq;
  if (op == "ge" || op == ">=") return CompareOp::Ge;
  if (op == "le" || op == "<=") return CompareOp::Le;
  invalid(where + ": unknown comparison '" + op + "'");
}

std::string_view op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Ge: return "ge";
    case CompareOp::Le: return "le";
  }
  return "eq";
}

std::vector<std::string> parse_vehicles(const nlohmann::json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_string()) invalid("vehicles: names must be strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  check_keys(v, "vehicles", {"count", "prefix"});
  const auto n = get<unsigned>(v, "count", "vehicles");
  const auto prefix = get_or<std::string>(v, "prefix", "V", "vehicles");
  for (unsigned i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Entries are either one explicit pair (optionally repeated) or a ring over
// all vehicles: vehicle k challenges vehicle k + 1.
void parse_sessions(const nlohmann::json& arr, const std::vector<std::string>& vehicles,
                    std::vector<SessionSpec>& out) {
  if (!arr.is_array()) invalid("sessions must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    const std::string where = "sessions[" + std::to_string(i) + "]";
    check_keys(e, where, {"at_ms", "initiator", "responder", "repeat", "interval_ms", "ring"});
    const double at = get_or<double>(e, "at_ms", 0.0, where);
    const double interval = get_or<double>(e, "interval_ms", 1.0, where);
    if (get_or<bool>(e, "ring", false, where)) {
      if (e.contains("initiator") || e.contains("responder") || e.contains("repeat")) {
        invalid(where + ": ring sessions take no initiator, responder or repeat");
      }
      if (vehicles.size() < 2) invalid(where + ": ring needs at least two vehicles");
      for (std::size_t k = 0; k < vehicles.size(); ++k) {
        out.push_back({at + static_cast<double>(k) * interval, vehicles[k],
                       vehicles[(k + 1) % vehicles.size()]});
      }
      continue;
    }
    const auto repeat = get_or<unsigned>(e, "repeat", 1u, where);
    if (repeat == 0) invalid(where + ": repeat must be at least 1");
    const auto ini = get<std::string>(e, "initiator", where);
    const auto res = get<std::string>(e, "responder", where);
    for (unsigned r = 0; r < repeat; ++r) out.push_back({at + r * interval, ini, res});
  }
}

AdversaryRule parse_rule(const nlohmann::json& e, const std::string& where) {
  check_keys(e, where, {"action", "match", "field", "bit", "delay_ms", "at_ms", "dst", "bytes_hex",
                        "random_length"});
  AdversaryRule r;
  r.kind = parse_action(get<std::string>(e, "action", where), where);
  if (e.contains("match")) {
    const auto& m = e.at("match");
    const std::string mw = where + ".match";
    check_keys(m, mw, {"type", "src", "dst", "session", "skip", "count"});
    if (m.contains("type")) r.match.type = parse_type(get<std::string>(m, "type", mw), mw);
    if (m.contains("src")) r.match.src = get<std::string>(m, "src", mw);
    if (m.contains("dst")) r.match.dst = get<std::string>(m, "dst", mw);
    if (m.contains("session")) r.match.session = get<std::size_t>(m, "session", mw);
    r.match.skip = get_or<unsigned>(m, "skip", 0u, mw);
    r.match.count = get_or<unsigned>(m, "count", 1u, mw);
  }
  r.field = get_or<std::string>(e, "field", "", where);
  if (e.contains("bit")) r.bit = get<std::size_t>(e, "bit", where);
  r.delay_ms = get_or<double>(e, "delay_ms", 0.0, where);
  r.at_ms = get_or<double>(e, "at_ms", 0.0, where);
  r.dst = get_or<std::string>(e, "dst", "", where);
  if (e.contains("bytes_hex")) {
    try {
      r.bytes = from_hex(get<std::string>(e, "bytes_hex", where));
    } catch (const std::exception&) {
      invalid(where + ": bytes_hex is not valid hex");
    }
  }
  r.random_length = get_or<std::size_t>(e, "random_length", 0, where);
  return r;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Drop: return "drop";
    case ActionKind::Tamper: return "tamper";
    case ActionKind::Replay: return "replay";
    case ActionKind::Inject: return "inject";
    case ActionKind::MitmSwap: return "mitm_swap";
  }
  return "unknown";
}

std::string_view to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::RandomSigma: return "random_sigma";
    case ProbeKind::ReuseSigma: return "reuse_sigma";
    case ProbeKind::PositiveControl: return "positive_control";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (name.empty()) invalid("name must not be empty");
  if (backend != "toy" && backend != "toy17" && backend != "production" && backend != "p256") {
    invalid("unknown backend '" + backend + "'");
  }
  if (window_ms == 0) invalid("window_ms must be positive");
  if (!(link.rate_bps > 0)) invalid("link.rate_bps must be positive");
  if (!(link.distance_m >= 0) || !(link.jitter_us >= 0)) invalid("link delays must be non-negative");
  if (!(link.loss >= 0 && link.loss < 1)) invalid("link.loss must be in [0, 1)");

  std::set<std::string> names;
  for (const auto& v : vehicles) {
    if (v.empty() || v == kAuthorityNode || v == kAdversaryNode) invalid("reserved vehicle name '" + v + "'");
    if (!names.insert(v).second) invalid("duplicate vehicle '" + v + "'");
  }
  auto known = [&](const std::string& v, const std::string& where) {
    if (!names.count(v)) invalid(where + ": unknown vehicle '" + v + "'");
  };
  auto known_node = [&](const std::string& v, const std::string& where) {
    if (v != kAuthorityNode && v != kAdversaryNode) known(v, where);
  };
  auto time_ok = [](double t) { return std::isfinite(t) && t >= 0; };

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto where = "sessions[" + std::to_string(i) + "]";
    known(sessions[i].initiator, where);
    known(sessions[i].responder, where);
    if (sessions[i].initiator == sessions[i].responder) invalid(where + ": a vehicle cannot authenticate itself");
    if (!time_ok(sessions[i].at_ms)) invalid(where + ": at_ms must be non-negative");
  }
  for (std::size_t i = 0; i < updates.size(); ++i) {
    const auto where = "updates[" + std::to_string(i) + "]";
    known(updates[i].vehicle, where);
    if (!time_ok(updates[i].at_ms)) invalid(where + ": at_ms must be non-negative");
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const auto where = "adversary.rules[" + std::to_string(i) + "]";
    if (r.match.src) known_node(*r.match.src, where);
    if (r.match.dst) known_node(*r.match.dst, where);
    if (r.match.session && *r.match.session >= sessions.size()) invalid(where + ": session out of range");
    switch (r.kind) {
      case ActionKind::Tamper: {
        if (!r.match.type) invalid(where + ": tamper needs match.type");
        if (!protocol::field_tag(*r.match.type, r.field)) invalid(where + ": unknown field '" + r.field + "'");
        break;
      }
      case ActionKind::MitmSwap:
        if (r.match.type != protocol::MessageType::Challenge &&
            r.match.type != protocol::MessageType::Response) {
          invalid(where + ": mitm_swap applies to ChallengeMsg or ResponseMsg");
        }
        break;
      case ActionKind::Replay:
        if (!time_ok(r.delay_ms)) invalid(where + ": delay_ms must be non-negative");
        break;
      case ActionKind::Inject:
        known_node(r.dst, where);
        if (r.bytes.empty() == (r.random_length == 0)) {
          invalid(where + ": inject needs exactly one of bytes_hex and random_length");
        }
        if (!time_ok(r.at_ms)) invalid(where + ": at_ms must be non-negative");
        break;
      case ActionKind::Drop:
        break;
    }
  }
  for (const auto& c : compromises) known(c.vehicle, "adversary.compromise");
  for (const auto& l : leaks) {
    if (l.session >= sessions.size()) invalid("adversary.leak: session out of range");
    if (l.secret != "a" && l.secret != "b") invalid("adversary.leak: secret must be 'a' or 'b'");
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto where = "probes[" + std::to_string(i) + "]";
    known(probes[i].target, where);
    known(probes[i].responder, where);
    if (probes[i].target == probes[i].responder) invalid(where + ": target and responder must differ");
    if (probes[i].trials == 0) invalid(where + ": trials must be at least 1");
  }
  if (stop_ms && !time_ok(*stop_ms)) invalid("stop_ms must be non-negative");
  for (const auto& e : expectations) {
    if (e.metric.empty()) invalid("expectation '" + e.name + "' has no metric");
  }
}

Scenario parse_scenario(const nlohmann::json& j) {
  check_keys(j, "scenario", {"name", "description", "seed", "backend", "window_ms", "link", "vehicles",
                             "sessions", "updates", "adversary", "probes", "stop_ms", "expect"});
  Scenario sc;
  sc.name = get<std::string>(j, "name", "scenario");
  sc.description = get_or<std::string>(j, "description", "", "scenario");
  sc.seed = get_or<std::uint64_t>(j, "seed", 1, "scenario");
  sc.backend = get_or<std::string>(j, "backend", "toy", "scenario");
  sc.window_ms = get_or<std::uint64_t>(j, "window_ms", 500, "scenario");

  if (j.contains("link")) {
    const auto& l = j.at("link");
    check_keys(l, "link", {"rate_bps", "distance_m", "jitter_us", "loss"});
    sc.link.rate_bps = get_or<double>(l, "rate_bps", sc.link.rate_bps, "link");
    sc.link.distance_m = get_or<double>(l, "distance_m", sc.link.distance_m, "link");
    sc.link.jitter_us = get_or<double>(l, "jitter_us", 0.0, "link");
    sc.link.loss = get_or<double>(l, "loss", 0.0, "link");
  }
  if (!j.contains("vehicles")) invalid("scenario: missing 'vehicles'");
  sc.vehicles = parse_vehicles(j.at("vehicles"));
  if (j.contains("sessions")) parse_sessions(j.at("sessions"), sc.vehicles, sc.sessions);

  if (j.contains("updates")) {
    const auto& arr = j.at("updates");
    if (!arr.is_array()) invalid("updates must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto where = "updates[" + std::to_string(i) + "]";
      check_keys(arr[i], where, {"at_ms", "vehicle"});
      sc.updates.push_back({get_or<double>(arr[i], "at_ms", 0.0, where),
                            get<std::string>(arr[i], "vehicle", where)});
    }
  }

  if (j.contains("adversary")) {
    const auto& a = j.at("adversary");
    check_keys(a, "adversary", {"rules", "compromise", "leak"});
    if (a.contains("rules")) {
      const auto& arr = a.at("rules");
      if (!arr.is_array()) invalid("adversary.rules must be an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        sc.rules.push_back(parse_rule(arr[i], "adversary.rules[" + std::to_string(i) + "]"));
      }
    }
    if (a.contains("compromise")) {
      for (const auto& c : a.at("compromise")) {
        check_keys(c, "adversary.compromise", {"vehicle"});
        sc.compromises.push_back({get<std::string>(c, "vehicle", "adversary.compromise")});
      }
    }
    if (a.contains("leak")) {
      for (const auto& l : a.at("leak")) {
        check_keys(l, "adversary.leak", {"session", "secret"});
        sc.leaks.push_back({get<std::size_t>(l, "session", "adversary.leak"),
                            get<std::string>(l, "secret", "adversary.leak")});
      }
    }
  }

  if (j.contains("probes")) {
    const auto& arr = j.at("probes");
    if (!arr.is_array()) invalid("probes must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto where = "probes[" + std::to_string(i) + "]";
      check_keys(arr[i], where, {"kind", "target", "responder", "trials"});
      ProbeSpec p;
      p.kind = parse_probe(get<std::string>(arr[i], "kind", where), where);
      p.target = get<std::string>(arr[i], "target", where);
      p.responder = get<std::string>(arr[i], "responder", where);
      p.trials = get_or<unsigned>(arr[i], "trials", 1u, where);
      sc.probes.push_back(p);
    }
  }

  if (j.contains("stop_ms")) sc.stop_ms = get<double>(j, "stop_ms", "scenario");

  if (j.contains("expect")) {
    const auto& arr = j.at("expect");
    if (!arr.is_array()) invalid("expect must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto where = "expect[" + std::to_string(i) + "]";
      check_keys(arr[i], where, {"name", "metric", "op", "value"});
      Expectation e;
      e.metric = get<std::string>(arr[i], "metric", where);
      e.name = get_or<std::string>(arr[i], "name", e.metric, where);
      e.op = parse_op(get_or<std::string>(arr[i], "op", "eq", where), where);
      const auto& v = arr[i].contains("value") ? arr[i].at("value") : nlohmann::json();
      if (v.is_boolean()) {
        e.value = v.get<bool>() ? 1 : 0;
      } else if (v.is_number()) {
        e.value = v.get<double>();
      } else {
        invalid(where + ": value must be a number or boolean");
      }
      sc.expectations.push_back(e);
    }
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
  nlohmann::ordered_json j;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  j["seed"] = sc.seed;
  j["backend"] = sc.backend;
  j["window_ms"] = sc.window_ms;
  j["link"] = {{"rate_bps", sc.link.rate_bps},
               {"distance_m", sc.link.distance_m},
               {"jitter_us", sc.link.jitter_us},
               {"loss", sc.link.loss}};
  j["vehicles"] = sc.vehicles;
  auto sessions = nlohmann::ordered_json::array();
  for (const auto& s : sc.sessions) {
    sessions.push_back({{"at_ms", s.at_ms}, {"initiator", s.initiator}, {"responder", s.responder}});
  }
  j["sessions"] = sessions;
  auto updates = nlohmann::ordered_json::array();
  for (const auto& u : sc.updates) updates.push_back({{"at_ms", u.at_ms}, {"vehicle", u.vehicle}});
  j["updates"] = updates;

  auto rules = nlohmann::ordered_json::array();
  for (const auto& r : sc.rules) {
    nlohmann::ordered_json e;
    e["action"] = to_string(r.kind);
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    if (r.match.type) m["type"] = protocol::to_string(*r.match.type);
    if (r.match.src) m["src"] = *r.match.src;
    if (r.match.dst) m["dst"] = *r.match.dst;
    if (r.match.session) m["session"] = *r.match.session;
    m["skip"] = r.match.skip;
    m["count"] = r.match.count;
    e["match"] = m;
    if (!r.field.empty()) e["field"] = r.field;
    if (r.bit) e["bit"] = *r.bit;
    if (r.kind == ActionKind::Replay) e["delay_ms"] = r.delay_ms;
    if (r.kind == ActionKind::Inject) {
      e["at_ms"] = r.at_ms;
      e["dst"] = r.dst;
      if (!r.bytes.empty()) e["bytes_hex"] = to_hex(r.bytes);
      if (r.random_length) e["random_length"] = r.random_length;
    }
    rules.push_back(e);
  }
  nlohmann::ordered_json adv;
  adv["rules"] = rules;
  adv["compromise"] = nlohmann::ordered_json::array();
  for (const auto& c : sc.compromises) adv["compromise"].push_back({{"vehicle", c.vehicle}});
  adv["leak"] = nlohmann::ordered_json::array();
  for (const auto& l : sc.leaks) adv["leak"].push_back({{"session", l.session}, {"secret", l.secret}});
  j["adversary"] = adv;

  auto probes = nlohmann::ordered_json::array();
  for (const auto& p : sc.probes) {
    probes.push_back({{"kind", to_string(p.kind)},
                      {"target", p.target},
                      {"responder", p.responder},
                      {"trials", p.trials}});
  }
  j["probes"] = probes;
  if (sc.stop_ms) j["stop_ms"] = *sc.stop_ms;
  auto exp = nlohmann::ordered_json::array();
  for (const auto& e : sc.expectations) {
    exp.push_back({{"name", e.name}, {"metric", e.metric}, {"op", op_name(e.op)}, {"value", e.value}});
  }
  j["expect"] = exp;
  return j;
}

}  // namespace eaia::netsim
