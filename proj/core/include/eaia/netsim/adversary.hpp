#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eaia/bytes.hpp"
#include "eaia/group/params.hpp"
#include "eaia/netsim/scenario.hpp"
#include "eaia/protocol/protocol.hpp"
#include "eaia/random.hpp"

namespace eaia::netsim {

struct ActionResult {
  std::optional<Bytes> frame;  // nullopt: delivery suppressed
  std::string detail;
};

// Applies one rule to a captured frame. Drop suppresses; tamper flips one bit
// inside the named field; mitm_swap replaces B (or D) with the adversary's
// own element. Replay and inject pass the frame through; the simulator
// schedules their extra copies.
ActionResult adversary_action(ByteView frame, const AdversaryRule& rule,
                              const group::SystemParams& params, RandomSource& rng);

// Everything the adversary has seen or been handed.
struct KnowledgeBase {
  std::vector<Bytes> frames;
  std::map<std::string, std::pair<group::Scalar, group::Scalar>> long_term;  // vehicle -> (x, y)
  std::map<std::size_t, group::Scalar> leaked_a;
  std::map<std::size_t, group::Scalar> leaked_b;
};

// Public transcript of one session as observed on the wire.
struct Transcript {
  protocol::AuthRequest request;
  protocol::ChallengeMsg challenge;
  protocol::ResponseMsg response;
};

struct KeyRecovery {
  std::optional<protocol::SessionKey> key;
  std::string path;  // which secrets made it work, or why it failed
};

// Tries every derivation the knowledge base allows. A candidate key counts
// only if it reproduces the response tag eta from the transcript.
KeyRecovery attempt_session_key(const group::SystemParams& params, const Transcript& t,
                                const KnowledgeBase& kb, std::size_t session,
                                const std::string& initiator, const std::string& responder);

// Builds a challenge claiming target_id.
//   RandomSigma:     own a, b and a uniformly random sigma
//   ReuseSigma:      a captured honest challenge with a fresh T_a
//   PositiveControl: the target's real (x, y)
protocol::ChallengeMsg forge_challenge(const group::SystemParams& params, ProbeKind kind,
                                       const protocol::Pseudonym& target_id,
                                       const protocol::AuthRequest& victim_request,
                                       protocol::Timestamp now, RandomSource& rng,
                                       const protocol::ChallengeMsg* captured,
                                       const protocol::StaticKeyMaterial* target_keys);

// Sends one forged challenge to the responder and reports "accepted" or the
// rejecting error kind.
std::string impersonation_probe(const group::SystemParams& params, ProbeKind kind,
                                const protocol::Pseudonym& target_id,
                                const protocol::StaticKeyMaterial& responder_keys,
                                const protocol::PeerDirectory& directory, protocol::Timestamp now,
                                std::uint64_t window_ms, RandomSource& rng,
                                const protocol::ChallengeMsg* captured = nullptr,
                                const protocol::StaticKeyMaterial* target_keys = nullptr);

}  // namespace eaia::netsim
