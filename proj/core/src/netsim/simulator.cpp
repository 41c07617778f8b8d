#include "eaia/netsim/simulator.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "eaia/authority/authority.hpp"
#include "eaia/costmodel/table.hpp"
#include "eaia/error.hpp"
#include "eaia/netsim/adversary.hpp"

namespace eaia::netsim {

namespace {

using protocol::MessageType;
using protocol::Pseudonym;
using protocol::Timestamp;

constexpr std::uint64_t kNsPerMs = 1'000'000;
constexpr std::uint64_t kTimeoutWindows = 10;

// Stream labels for derive_seed.
constexpr std::uint64_t kAuthorityStream = 1;
constexpr std::uint64_t kAdversaryStream = 2;
constexpr std::uint64_t kLinkStream = 3;
constexpr std::uint64_t kProbeStream = 4;
constexpr std::uint64_t kVehicleStreamBase = 1000;

std::uint64_t ms_to_ns(double ms) { return static_cast<std::uint64_t>(std::llround(ms * 1e6)); }
double ns_to_ms(std::uint64_t ns) { return static_cast<double>(ns) / 1e6; }
Timestamp stamp(std::uint64_t ns) { return Timestamp{ns / kNsPerMs}; }

struct Vehicle {
  std::string name;
  protocol::RealId rid;
  protocol::StaticKeyMaterial keys;
  SeededRandom rng;
  protocol::ReplayCache cache;
};

struct Frame {
  std::string src;
  std::string dst;
  Bytes bytes;
  std::optional<std::size_t> session;
  std::optional<std::size_t> update;
  std::optional<std::size_t> action;
  // Adversary copies and injections; never drive a session by their tag.
  bool detached = false;
};

enum class EventKind { StartSession, StartUpdate, Inject, Deliver, Timeout };

struct Event {
  std::uint64_t at = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Deliver;
  std::size_t index = 0;
  Frame frame;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.at != b.at ? a.at > b.at : a.seq > b.seq;
  }
};

enum class Phase { Idle, AwaitRequest, ChallengeSent, Done };

struct SessionState {
  Phase phase = Phase::Idle;
  std::optional<protocol::EphemeralState> eph;
  protocol::SessionKey key_i;
  protocol::SessionKey key_j;
  std::optional<protocol::AuthRequest> request;
  std::optional<protocol::ChallengeMsg> challenge;
  std::optional<protocol::ResponseMsg> response;
};

struct UpdateState {
  bool pending = false;
  Pseudonym old_id;
};

class Simulation {
 public:
  explicit Simulation(const Scenario& sc)
      : sc_(sc),
        authority_rng_(derive_seed(sc.seed, kAuthorityStream)),
        adversary_rng_(derive_seed(sc.seed, kAdversaryStream)),
        link_rng_(derive_seed(sc.seed, kLinkStream)),
        probe_rng_(derive_seed(sc.seed, kProbeStream)),
        authority_(authority::Authority::setup(group::make_group(sc.backend), {}, authority_rng_)),
        params_(authority_.params()),
        profile_(protocol::WireProfile::from(params_)) {
    rule_hits_.assign(sc.rules.size(), 0);
    rule_uses_.assign(sc.rules.size(), 0);
    for (std::size_t i = 0; i < sc.vehicles.size(); ++i) enroll(i);
  }

  RunReport run() {
    report_.scenario = sc_.name;
    report_.seed = sc_.seed;
    report_.backend = std::string(params_.g().name());
    report_.window_ms = sc_.window_ms;

    sessions_.resize(sc_.sessions.size());
    for (std::size_t i = 0; i < sc_.sessions.size(); ++i) {
      const auto& spec = sc_.sessions[i];
      SessionRecord r;
      r.index = i;
      r.initiator = spec.initiator;
      r.responder = spec.responder;
      r.started_ms = spec.at_ms;
      report_.sessions.push_back(r);
      schedule(ms_to_ns(spec.at_ms), EventKind::StartSession, i);
    }
    update_state_.resize(sc_.updates.size());
    for (std::size_t i = 0; i < sc_.updates.size(); ++i) {
      UpdateRecord r;
      r.index = i;
      r.vehicle = sc_.updates[i].vehicle;
      r.started_ms = sc_.updates[i].at_ms;
      report_.updates.push_back(r);
      schedule(ms_to_ns(sc_.updates[i].at_ms), EventKind::StartUpdate, i);
    }
    for (std::size_t i = 0; i < sc_.rules.size(); ++i) {
      if (sc_.rules[i].kind == ActionKind::Inject) {
        schedule(ms_to_ns(sc_.rules[i].at_ms), EventKind::Inject, i);
      }
    }

    const std::optional<std::uint64_t> stop =
        sc_.stop_ms ? std::optional(ms_to_ns(*sc_.stop_ms)) : std::nullopt;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      if (stop && ev.at > *stop) break;
      queue_.pop();
      now_ = ev.at;
      dispatch(ev);
    }
    while (!queue_.empty()) {
      if (queue_.top().kind == EventKind::Deliver) ++report_.messages.pending;
      queue_.pop();
    }
    for (auto& s : sessions_) {
      if (s.eph) close_ephemeral(s);
    }

    run_probes();
    attempt_key_recovery();
    report_.knowledge_frames = kb_.frames.size();
    report_.sim_time_ms = ns_to_ms(now_);
    report_.evaluate(sc_.expectations);
    return std::move(report_);
  }

 private:
  void enroll(std::size_t i) {
    const std::string& name = sc_.vehicles[i];
    Vehicle v{name, protocol::real_id_from_vin("VIN-" + name), {},
              SeededRandom(derive_seed(sc_.seed, kVehicleStreamBase + i)),
              protocol::ReplayCache(2 * sc_.window_ms)};
    group::Scalar x = params_.g().random_nonzero(v.rng);
    const auto X = params_.g().mul_generator(x);
    const auto reply = authority_.register_vehicle(v.rid, X.bytes(), Timestamp{0}, authority_rng_);
    v.keys = protocol::verify_registration(params_, reply, x);
    x.wipe();
    issued_.insert(v.keys.id);
    index_[name] = vehicles_.size();
    vehicles_.push_back(std::move(v));
  }

  Vehicle& vehicle(const std::string& name) { return vehicles_.at(index_.at(name)); }

  void schedule(std::uint64_t at, EventKind kind, std::size_t index, Frame frame = {}) {
    queue_.push(Event{at, seq_++, kind, index, std::move(frame)});
  }

  void count_error(ErrorKind kind) { ++report_.errors[std::string(to_string(kind))]; }

  // ---- transmission --------------------------------------------------------

  void send(Frame f) {
    const auto type = protocol::peek_type(f.bytes);
    const std::string type_name = type ? std::string(protocol::to_string(*type)) : "unknown";
    ++report_.messages.sent;
    report_.messages.bytes_sent += f.bytes.size();
    auto& bt = report_.messages.by_type[type_name];
    ++bt.first;
    bt.second += f.bytes.size();
    kb_.frames.push_back(f.bytes);

    if (f.src != kAdversaryNode && !f.detached) {
      scan_for_pseudonyms(f, type);
      if (apply_rules(f, type, type_name)) return;
    }
    transmit(std::move(f));
  }

  // Returns true when the frame was suppressed.
  bool apply_rules(Frame& f, std::optional<MessageType> type, const std::string& type_name) {
    for (std::size_t r = 0; r < sc_.rules.size(); ++r) {
      const auto& rule = sc_.rules[r];
      if (rule.kind == ActionKind::Inject) continue;
      const auto& m = rule.match;
      if (m.type && m.type != type) continue;
      if (m.src && *m.src != f.src) continue;
      if (m.dst && *m.dst != f.dst) continue;
      if (m.session && m.session != f.session) continue;
      if (rule_hits_[r]++ < m.skip) continue;
      if (m.count != 0 && rule_uses_[r] >= m.count) continue;
      ++rule_uses_[r];

      ActionRecord a;
      a.index = report_.actions.size();
      a.rule = r;
      a.kind = rule.kind;
      a.at_ms = ns_to_ms(now_);
      a.type = type_name;
      a.src = f.src;
      a.dst = f.dst;
      a.session = f.session;
      auto result = adversary_action(f.bytes, rule, params_, adversary_rng_);
      a.detail = result.detail;
      report_.actions.push_back(a);

      switch (rule.kind) {
        case ActionKind::Drop:
          ++report_.messages.suppressed;
          report_.actions.back().outcome = "suppressed";
          return true;
        case ActionKind::Replay: {
          Frame copy = f;
          copy.detached = true;
          copy.action = a.index;
          report_.actions.back().detail = "copy re-sent after " + cost::format_number(rule.delay_ms) + " ms";
          ++report_.messages.sent;
          report_.messages.bytes_sent += copy.bytes.size();
          auto& bt = report_.messages.by_type[type_name];
          ++bt.first;
          bt.second += copy.bytes.size();
          transmit(std::move(copy), ms_to_ns(rule.delay_ms));
          return false;
        }
        default:
          f.bytes = std::move(*result.frame);
          f.action = a.index;
          return false;
      }
    }
    return false;
  }

  void transmit(Frame f, std::uint64_t extra_ns = 0) {
    if (sc_.link.loss > 0 && std::bernoulli_distribution(sc_.link.loss)(link_rng_.engine())) {
      ++report_.messages.dropped;
      if (f.action) resolve(*f.action, "lost on link");
      return;
    }
    const double tt_ns = static_cast<double>(f.bytes.size() * 8) / sc_.link.rate_bps * 1e9;
    const double tp_ns = sc_.link.distance_m / 3e8 * 1e9;
    double jitter_ns = 0;
    if (sc_.link.jitter_us > 0) {
      jitter_ns = std::uniform_real_distribution<double>(0, sc_.link.jitter_us * 1e3)(link_rng_.engine());
    }
    const auto delay = static_cast<std::uint64_t>(std::llround(tt_ns + tp_ns + jitter_ns));
    schedule(now_ + extra_ns + delay, EventKind::Deliver, 0, std::move(f));
  }

  void resolve(std::size_t action, const std::string& outcome) {
    auto& a = report_.actions.at(action);
    if (a.outcome.empty()) a.outcome = outcome;
  }

  // Challenges and responses must never carry a pseudonym in the clear. The
  // auth request names its sender by design, so only foreign ids count there.
  void scan_for_pseudonyms(const Frame& f, std::optional<MessageType> type) {
    if (!type) return;
    ++report_.frames_scanned;
    for (const auto& id : issued_) {
      if (!contains_subsequence(f.bytes, id.view())) continue;
      if (*type == MessageType::AuthRequest && index_.count(f.src) && vehicle(f.src).keys.id == id) continue;
      if (*type == MessageType::PseudonymUpdateRequest) continue;
      ++report_.pseudonym_leaks;
    }
  }

  // ---- event handlers ------------------------------------------------------

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::StartSession: start_session(ev.index); break;
      case EventKind::StartUpdate: start_update(ev.index); break;
      case EventKind::Inject: inject(ev.index); break;
      case EventKind::Timeout: timeout(ev.index); break;
      case EventKind::Deliver: deliver(ev.frame); break;
    }
  }

  void start_session(std::size_t i) {
    const auto& spec = sc_.sessions[i];
    auto& s = sessions_[i];
    s.phase = Phase::AwaitRequest;
    const auto req = protocol::make_auth_request(params_, vehicle(spec.responder).keys);
    s.request = req;
    send(Frame{spec.responder, spec.initiator, protocol::encode_message(req), i, {}, {}, false});
    schedule(now_ + kTimeoutWindows * sc_.window_ms * kNsPerMs, EventKind::Timeout, i);
  }

  void start_update(std::size_t i) {
    Vehicle& v = vehicle(sc_.updates[i].vehicle);
    update_state_[i] = {true, v.keys.id};
    const auto req = protocol::pseudonym_update_request(params_, v.keys, stamp(now_), v.rng);
    send(Frame{v.name, kAuthorityNode, protocol::encode_message(req), {}, i, {}, false});
  }

  void inject(std::size_t r) {
    const auto& rule = sc_.rules[r];
    Bytes payload = rule.bytes;
    if (payload.empty()) {
      payload.resize(rule.random_length);
      adversary_rng_.fill(payload);
    }
    ActionRecord a;
    a.index = report_.actions.size();
    a.rule = r;
    a.kind = ActionKind::Inject;
    a.at_ms = ns_to_ms(now_);
    const auto type = protocol::peek_type(payload);
    a.type = type ? std::string(protocol::to_string(*type)) : "unknown";
    a.src = kAdversaryNode;
    a.dst = rule.dst;
    a.detail = std::to_string(payload.size()) + " bytes";
    report_.actions.push_back(a);
    send(Frame{kAdversaryNode, rule.dst, std::move(payload), {}, {}, a.index, true});
  }

  void timeout(std::size_t i) {
    auto& s = sessions_[i];
    if (s.phase == Phase::Done) return;
    s.phase = Phase::Done;
    auto& r = report_.sessions[i];
    r.outcome = "Timeout";
    if (s.eph) close_ephemeral(s);
  }

  void close_ephemeral(SessionState& s) {
    s.eph->wipe();
    ++report_.zeroization_checks;
    if (!s.eph->zeroized()) ++report_.zeroization_violations;
    s.eph.reset();
  }

  void fail_session(std::size_t i, const std::string& node, const std::string& outcome) {
    auto& s = sessions_[i];
    if (s.phase == Phase::Done) return;
    s.phase = Phase::Done;
    auto& r = report_.sessions[i];
    r.outcome = outcome;
    r.failed_at = node;
    r.completed_ms = ns_to_ms(now_);
    if (s.eph) close_ephemeral(s);
  }

  void deliver(const Frame& f) {
    ++report_.messages.delivered;
    report_.messages.bytes_delivered += f.bytes.size();
    std::string outcome;
    try {
      outcome = handle(f);
    } catch (const Error& e) {
      count_error(e.kind());
      outcome = std::string(to_string(e.kind()));
      if (f.session && !f.detached) fail_session(*f.session, f.dst, outcome);
      if (f.update && !f.detached) report_.updates[*f.update].outcome = outcome;
    }
    if (f.action) resolve(*f.action, outcome);
  }

  std::string handle(const Frame& f) {
    const auto msg = protocol::decode_message(f.bytes, profile_);
    if (f.dst == kAuthorityNode) {
      if (const auto* req = std::get_if<protocol::PseudonymUpdateRequest>(&msg)) {
        return authority_update(f, *req);
      }
      return "ignored";
    }
    if (!index_.count(f.dst)) return "ignored";
    Vehicle& v = vehicle(f.dst);
    return std::visit(
        [&](const auto& m) -> std::string {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, protocol::AuthRequest>) return on_request(f, v, m);
          if constexpr (std::is_same_v<T, protocol::ChallengeMsg>) return on_challenge(f, v, m);
          if constexpr (std::is_same_v<T, protocol::ResponseMsg>) return on_response(f, v, m);
          if constexpr (std::is_same_v<T, protocol::PseudonymUpdateReply>) return on_update_reply(f, v, m);
          return "ignored";
        },
        msg);
  }

  std::string on_request(const Frame& f, Vehicle& v, const protocol::AuthRequest& req) {
    if (!f.session || f.detached) return "ignored";
    const std::size_t i = *f.session;
    auto& s = sessions_[i];
    if (s.phase != Phase::AwaitRequest || sc_.sessions[i].initiator != v.name) return "ignored";
    auto c = protocol::build_challenge(params_, req, v.keys, stamp(now_), v.rng);
    for (const auto& leak : sc_.leaks) {
      if (leak.session != i) continue;
      if (leak.secret == "a") kb_.leaked_a.insert_or_assign(i, c.state.a);
      if (leak.secret == "b") kb_.leaked_b.insert_or_assign(i, c.state.b);
    }
    s.challenge = c.msg;
    s.eph.emplace(std::move(c.state));
    s.phase = Phase::ChallengeSent;
    send(Frame{v.name, f.src, protocol::encode_message(c.msg), i, {}, {}, false});
    return "challenge_issued";
  }

  std::string on_challenge(const Frame& f, Vehicle& v, const protocol::ChallengeMsg& msg) {
    auto out = protocol::process_challenge(params_, msg, v.keys, authority_, stamp(now_),
                                           sc_.window_ms, v.rng, &v.cache);
    if (!f.session || f.detached) return "accepted";
    const std::size_t i = *f.session;
    auto& s = sessions_[i];
    if (s.phase != Phase::ChallengeSent || sc_.sessions[i].responder != v.name) return "accepted";
    s.key_j = out.key;
    s.response = out.msg;
    report_.sessions[i].responder_key = true;
    send(Frame{v.name, f.src, protocol::encode_message(out.msg), i, {}, {}, false});
    return "accepted";
  }

  std::string on_response(const Frame& f, Vehicle& v, const protocol::ResponseMsg& msg) {
    // A detached response is offered to the first open session with that
    // peer, as a real node could not tell it apart.
    std::optional<std::size_t> target;
    if (f.session && !f.detached) {
      target = f.session;
    } else {
      for (std::size_t i = 0; i < sessions_.size(); ++i) {
        if (sessions_[i].phase == Phase::ChallengeSent && sc_.sessions[i].initiator == v.name &&
            sc_.sessions[i].responder == f.src) {
          target = i;
          break;
        }
      }
    }
    if (!target) return "ignored";
    const std::size_t i = *target;
    auto& s = sessions_[i];
    if (s.phase != Phase::ChallengeSent || !s.eph || sc_.sessions[i].initiator != v.name) {
      return "ignored";
    }
    protocol::SessionKey key;
    try {
      key = protocol::finalize(params_, msg, *s.eph, v.keys, stamp(now_), sc_.window_ms);
    } catch (const Error& e) {
      count_error(e.kind());
      fail_session(i, v.name, std::string(to_string(e.kind())));
      return std::string(to_string(e.kind()));
    }
    close_ephemeral(s);
    s.key_i = key;
    s.phase = Phase::Done;
    auto& r = report_.sessions[i];
    r.initiator_key = true;
    r.sk_match = !s.key_j.empty() && s.key_i == s.key_j;
    r.outcome = r.sk_match ? "success" : "KeyMismatch";
    r.completed_ms = ns_to_ms(now_);
    return "accepted";
  }

  std::string authority_update(const Frame& f, const protocol::PseudonymUpdateRequest& req) {
    const auto reply =
        authority_.process_pseudonym_update(req, stamp(now_), sc_.window_ms, authority_rng_);
    if (f.update && !f.detached) {
      send(Frame{kAuthorityNode, f.src, protocol::encode_message(reply), {}, f.update, {}, false});
    }
    return "accepted";
  }

  std::string on_update_reply(const Frame& f, Vehicle& v, const protocol::PseudonymUpdateReply& reply) {
    std::optional<std::size_t> target;
    for (std::size_t i = 0; i < update_state_.size(); ++i) {
      if (update_state_[i].pending && sc_.updates[i].vehicle == v.name &&
          (!f.update || f.detached || *f.update == i)) {
        target = i;
        break;
      }
    }
    if (!target) return "ignored";
    auto& st = update_state_[*target];
    auto& r = report_.updates[*target];
    st.pending = false;
    const auto id = protocol::pseudonym_update_finalize(params_, reply, v.keys, stamp(now_), sc_.window_ms);
    issued_.insert(id);
    const auto record = authority_.record_for(v.rid);
    r.id_consistent = record && record->current_id == id;
    r.old_id_retired = !authority_.find(st.old_id).has_value();
    r.outcome = "success";
    return "accepted";
  }

  // ---- post-run analysis ---------------------------------------------------

  void run_probes() {
    const Timestamp now = stamp(now_);
    for (const auto& spec : sc_.probes) {
      ProbeRecord p;
      p.kind = spec.kind;
      p.target = spec.target;
      p.responder = spec.responder;
      p.trials = spec.trials;
      const Vehicle& target = vehicle(spec.target);
      const Vehicle& responder = vehicle(spec.responder);

      const protocol::ChallengeMsg* captured = nullptr;
      if (spec.kind == ProbeKind::ReuseSigma) {
        for (std::size_t i = 0; i < sessions_.size(); ++i) {
          if (sessions_[i].challenge && sc_.sessions[i].initiator == spec.target &&
              sc_.sessions[i].responder == spec.responder) {
            captured = &*sessions_[i].challenge;
            break;
          }
        }
        if (captured == nullptr) {
          p.outcomes["no_capture"] = spec.trials;
          report_.probes.push_back(p);
          continue;
        }
      }
      const protocol::StaticKeyMaterial* keys =
          spec.kind == ProbeKind::PositiveControl ? &target.keys : nullptr;
      for (unsigned t = 0; t < spec.trials; ++t) {
        // Each trial has its own responder cache, so it is judged on its own.
        const Timestamp at{now.ms + t};
        ++p.outcomes[impersonation_probe(params_, spec.kind, target.keys.id, responder.keys,
                                         authority_, at, sc_.window_ms, probe_rng_, captured,
                                         keys)];
      }
      report_.probes.push_back(p);
    }
  }

  void attempt_key_recovery() {
    if (sc_.compromises.empty() && sc_.leaks.empty()) return;
    std::vector<std::string> granted;
    for (const auto& c : sc_.compromises) {
      const Vehicle& v = vehicle(c.vehicle);
      kb_.long_term.insert_or_assign(c.vehicle, std::make_pair(v.keys.x, v.keys.y));
      granted.push_back("long_term:" + c.vehicle);
    }
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
      const auto& s = sessions_[i];
      if (!s.request || !s.challenge || !s.response || s.key_i.empty()) continue;
      KeyRecoveryRecord k;
      k.session = i;
      k.secrets = granted;
      for (const auto& l : sc_.leaks) {
        if (l.session == i) k.secrets.push_back("ephemeral:" + l.secret);
      }
      const auto rec = attempt_session_key(params_, Transcript{*s.request, *s.challenge, *s.response},
                                           kb_, i, sc_.sessions[i].initiator, sc_.sessions[i].responder);
      k.recovered = rec.key && *rec.key == s.key_i;
      k.path = rec.path;
      report_.key_recovery.push_back(k);
    }
  }

  const Scenario& sc_;
  SeededRandom authority_rng_;
  SeededRandom adversary_rng_;
  SeededRandom link_rng_;
  SeededRandom probe_rng_;
  authority::Authority authority_;
  group::SystemParams params_;
  protocol::WireProfile profile_;

  std::vector<Vehicle> vehicles_;
  std::map<std::string, std::size_t> index_;
  std::set<Pseudonym> issued_;
  std::vector<SessionState> sessions_;
  std::vector<UpdateState> update_state_;
  std::vector<unsigned> rule_hits_;
  std::vector<unsigned> rule_uses_;
  KnowledgeBase kb_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t now_ = 0;
  RunReport report_;
};

}  // namespace

RunReport run_scenario(const Scenario& sc, const RunOptions& options) {
  sc.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport report = Simulation(sc).run();
  if (options.timing) {
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace eaia::netsim
