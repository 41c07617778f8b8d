#include "eaia/netsim/adversary.hpp"

#include "eaia/error.hpp"
#include "eaia/group/hash.hpp"

namespace eaia::netsim {

using group::GroupPoint;
using group::Scalar;
using protocol::MessageType;

namespace {

std::uint64_t draw_below(RandomSource& rng, std::uint64_t bound) {
  std::uint8_t buf[8];
  rng.fill(buf);
  std::uint64_t v = 0;
  for (std::uint8_t b : buf) v = (v << 8) | b;
  return v % bound;
}

}  // namespace

ActionResult adversary_action(ByteView frame, const AdversaryRule& rule,
                              const group::SystemParams& params, RandomSource& rng) {
  ActionResult out;
  switch (rule.kind) {
    case ActionKind::Drop:
      out.detail = "suppressed";
      return out;
    case ActionKind::Replay:
    case ActionKind::Inject:
      out.frame = Bytes(frame.begin(), frame.end());
      return out;
    case ActionKind::Tamper: {
      Bytes copy(frame.begin(), frame.end());
      const auto type = protocol::peek_type(copy);
      const auto tag = type ? protocol::field_tag(*type, rule.field) : std::nullopt;
      const auto span = tag ? protocol::locate_field(copy, *tag) : std::nullopt;
      if (!span || span->length == 0) {
        out.frame = std::move(copy);
        out.detail = "field " + rule.field + " not found; passed through";
        return out;
      }
      const std::size_t bits = span->length * 8;
      const std::size_t bit = rule.bit ? *rule.bit % bits : draw_below(rng, bits);
      copy[span->offset + bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      out.frame = std::move(copy);
      out.detail = "flipped bit " + std::to_string(bit) + " of " + rule.field;
      return out;
    }
    case ActionKind::MitmSwap: {
      Bytes copy(frame.begin(), frame.end());
      const auto type = protocol::peek_type(copy);
      const char* field = type == MessageType::Response ? "D" : "B";
      const auto tag = type ? protocol::field_tag(*type, field) : std::nullopt;
      const auto span = tag ? protocol::locate_field(copy, *tag) : std::nullopt;
      const group::Group& g = params.g();
      if (!span || span->length != g.point_bytes()) {
        out.frame = std::move(copy);
        out.detail = "no point field to swap; passed through";
        return out;
      }
      Scalar own = g.random_nonzero(rng);
      const Bytes replacement = g.mul_generator(own).bytes();
      own.wipe();
      std::copy(replacement.begin(), replacement.end(),
                copy.begin() + static_cast<std::ptrdiff_t>(span->offset));
      out.frame = std::move(copy);
      out.detail = std::string("replaced ") + field + " with adversary element";
      return out;
    }
  }
  return out;
}

KeyRecovery attempt_session_key(const group::SystemParams& params, const Transcript& t,
                                const KnowledgeBase& kb, std::size_t session,
                                const std::string& initiator, const std::string& responder) {
  const group::Group& g = params.g();
  KeyRecovery out;
  try {
    const GroupPoint B = g.decode_point(t.challenge.B);
    const GroupPoint peer_sum = g.decode_point(t.request.requester_pub_sum);
    const protocol::Pseudonym id_j = t.request.requester_id;

    // Unmasking N needs M = b (X_j + Y_j) = (x_j + y_j) B.
    std::optional<GroupPoint> M;
    if (const auto it = kb.leaked_b.find(session); it != kb.leaked_b.end()) {
      M = g.point_mul(it->second, peer_sum);
    } else if (const auto lt = kb.long_term.find(responder); lt != kb.long_term.end()) {
      M = g.point_mul(g.scalar_add(lt->second.first, lt->second.second), B);
    }
    if (!M) {
      out.path = "cannot unmask N without b or (x_j, y_j)";
      return out;
    }
    const Bytes plain = xor_bytes(group::h2_mask(*M, t.challenge.N.size() * 8), t.challenge.N);
    const auto id_i = protocol::Pseudonym::from_bytes(ByteView(plain).first(protocol::kIdBytes));
    const GroupPoint A = g.decode_point(ByteView(plain).subspan(protocol::kIdBytes));
    const GroupPoint D = g.decode_point(t.response.D);
    const Scalar k = protocol::session_binding(g, id_i, id_j, A, D, t.response.t_b);

    // The shared point is (k a + x_i) D; with only public values that is a
    // Diffie-Hellman problem in D.
    std::optional<GroupPoint> shared;
    const auto a = kb.leaked_a.find(session);
    const auto lt_i = kb.long_term.find(initiator);
    if (a != kb.leaked_a.end() && lt_i != kb.long_term.end()) {
      shared = g.point_mul(g.scalar_add(g.scalar_mul(k, a->second), lt_i->second.first), D);
      out.path = "a and x_i";
    }
    if (!shared) {
      out.path = a != kb.leaked_a.end() ? "a known but x_i unknown"
                                        : "ephemeral a unknown; (k a + x_i) D needs CDH";
      return out;
    }
    const auto key = protocol::derive_session_key(params, id_i, id_j, *shared);
    if (protocol::response_tag(params, id_i, id_j, key, t.response.t_b) == t.response.eta) {
      out.key = key;
    } else {
      out.path += " (candidate failed the tag check)";
    }
  } catch (const Error& e) {
    out.path = std::string("transcript unusable: ") + e.what();
  }
  return out;
}

protocol::ChallengeMsg forge_challenge(const group::SystemParams& params, ProbeKind kind,
                                       const protocol::Pseudonym& target_id,
                                       const protocol::AuthRequest& victim_request,
                                       protocol::Timestamp now, RandomSource& rng,
                                       const protocol::ChallengeMsg* captured,
                                       const protocol::StaticKeyMaterial* target_keys) {
  const group::Group& g = params.g();
  switch (kind) {
    case ProbeKind::PositiveControl: {
      if (target_keys == nullptr) fail(ErrorKind::InvalidArgument, "control probe needs the target keys");
      auto c = protocol::build_challenge(params, victim_request, *target_keys, now, rng);
      return c.msg;
    }
    case ProbeKind::ReuseSigma: {
      if (captured == nullptr) fail(ErrorKind::InvalidArgument, "reuse probe needs a captured challenge");
      protocol::ChallengeMsg msg = *captured;
      msg.t_a = now;
      return msg;
    }
    case ProbeKind::RandomSigma: {
      const GroupPoint peer_sum = g.decode_point(victim_request.requester_pub_sum);
      Scalar a = g.random_nonzero(rng);
      Scalar b = g.random_nonzero(rng);
      const GroupPoint A = g.mul_generator(a);
      const GroupPoint M = g.point_mul(b, peer_sum);
      const Bytes plain = concat(target_id.view(), A.bytes());
      protocol::ChallengeMsg msg;
      msg.B = g.mul_generator(b).bytes();
      msg.N = xor_bytes(group::h2_mask(M, plain.size() * 8), plain);
      msg.sigma = g.random_nonzero(rng).bytes();
      msg.t_a = now;
      a.wipe();
      b.wipe();
      return msg;
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown probe kind");
}

std::string impersonation_probe(const group::SystemParams& params, ProbeKind kind,
                                const protocol::Pseudonym& target_id,
                                const protocol::StaticKeyMaterial& responder_keys,
                                const protocol::PeerDirectory& directory, protocol::Timestamp now,
                                std::uint64_t window_ms, RandomSource& rng,
                                const protocol::ChallengeMsg* captured,
                                const protocol::StaticKeyMaterial* target_keys) {
  const auto request = protocol::make_auth_request(params, responder_keys);
  const auto msg = forge_challenge(params, kind, target_id, request, now, rng, captured, target_keys);
  try {
    protocol::ReplayCache cache(2 * window_ms);
    protocol::process_challenge(params, msg, responder_keys, directory, now, window_ms, rng, &cache);
    return "accepted";
  } catch (const Error& e) {
    return std::string(to_string(e.kind()));
  }
}

}  // namespace eaia::netsim
