#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "eaia/bytes.hpp"
#include "eaia/group/params.hpp"
#include "eaia/protocol/types.hpp"
#include "eaia/protocol/wire.hpp"
#include "eaia/random.hpp"

namespace eaia::protocol {

inline constexpr std::uint64_t kDefaultWindowMs = 500;

// Resolves a pseudonym to the public keys the authority published for it.
class PeerDirectory {
 public:
  virtual ~PeerDirectory() = default;
  virtual std::optional<PublicKeyPair> find(const Pseudonym& id) const = 0;
  // Whether some registered vehicle currently owns this Y. Used to tell a
  // valid signature under a retired or unissued pseudonym apart from a
  // forgery.
  virtual bool has_public_key(const group::GroupPoint& Y) const = 0;
};

// Digests of accepted challenges, kept for a fixed retention period so a
// verbatim re-delivery inside the freshness window is still refused.
class ReplayCache {
 public:
  explicit ReplayCache(std::uint64_t retention_ms = 2 * kDefaultWindowMs)
      : retention_ms_(retention_ms) {}

  bool contains(const Bytes& digest, Timestamp now);
  void insert(const Bytes& digest, Timestamp now);
  std::size_t size() const { return expiry_.size(); }

 private:
  void prune(Timestamp now);

  std::uint64_t retention_ms_;
  std::map<Bytes, std::uint64_t> expiry_;
};

// Checks the authority's reply against y*P = R + h1(id || X || R) * P_pub and
// Y = y*P, then assembles the vehicle's key material.
StaticKeyMaterial verify_registration(const group::SystemParams& params,
                                      const RegistrationReply& reply, const group::Scalar& x);

AuthRequest make_auth_request(const group::SystemParams& params, const StaticKeyMaterial& keys);

struct Challenge {
  ChallengeMsg msg;
  EphemeralState state;
};

// Challenger side, step 1. Encrypts (own id || A) under the requester's
// public key sum and signs with y.
Challenge build_challenge(const group::SystemParams& params, const AuthRequest& request,
                          const StaticKeyMaterial& keys_i, Timestamp now, RandomSource& rng);

struct ResponderOutcome {
  ResponseMsg msg;
  SessionKey key;
  Pseudonym peer;
};

// Requester side, step 2: freshness, replay cache, identity recovery,
// signature check, then session key derivation and the response tag.
//
// Failure mapping: anything that stops the challenge from authenticating
// (undecodable B or recovered A, out-of-range sigma, failed signature
// equation) is SignatureInvalid. A recovered pseudonym that is not in the
// directory is UnknownPeer only when sigma still verifies against some
// registered public key; otherwise it is SignatureInvalid.
ResponderOutcome process_challenge(const group::SystemParams& params, const ChallengeMsg& msg,
                                   const StaticKeyMaterial& keys_j, const PeerDirectory& directory,
                                   Timestamp now, std::uint64_t window_ms, RandomSource& rng,
                                   ReplayCache* replay = nullptr);

// Challenger side, step 3. Always wipes eph, on success and on failure.
SessionKey finalize(const group::SystemParams& params, const ResponseMsg& msg, EphemeralState& eph,
                    const StaticKeyMaterial& keys_i, Timestamp now, std::uint64_t window_ms);

PseudonymUpdateRequest pseudonym_update_request(const group::SystemParams& params,
                                                const StaticKeyMaterial& keys, Timestamp now,
                                                RandomSource& rng);

// Recovers the new pseudonym from Q and installs it in keys.
Pseudonym pseudonym_update_finalize(const group::SystemParams& params,
                                    const PseudonymUpdateReply& reply, StaticKeyMaterial& keys,
                                    Timestamp now, std::uint64_t window_ms);

// sigma * B == h1(id || A || t) * P + Y
bool verify_signature(const group::Group& g, const group::Scalar& sigma,
                      const group::GroupPoint& B, const Pseudonym& id, const group::GroupPoint& A,
                      Timestamp t, const group::GroupPoint& Y);

// sigma = b^-1 * (h1(id || A || t) + y); zero means redraw.
group::Scalar sign(const group::Group& g, const group::Scalar& b, const Pseudonym& id,
                   const group::GroupPoint& A, Timestamp t, const group::Scalar& y);

// h1(ID_i || ID_j || A || D || T_b)
group::Scalar session_binding(const group::Group& g, const Pseudonym& id_i, const Pseudonym& id_j,
                              const group::GroupPoint& A, const group::GroupPoint& D,
                              Timestamp t_b);

SessionKey derive_session_key(const group::SystemParams& params, const Pseudonym& id_i,
                              const Pseudonym& id_j, const group::GroupPoint& shared);

Bytes response_tag(const group::SystemParams& params, const Pseudonym& id_i,
                   const Pseudonym& id_j, const SessionKey& sk, Timestamp t_b);

Bytes challenge_digest(const group::SystemParams& params, const ChallengeMsg& msg);

// h_mask(s || R) style XOR mask used for pseudonym issue and update.
Bytes pseudonym_mask(const group::SystemParams& params, ByteView input);

}  // namespace eaia::protocol
