#include "eaia/protocol/protocol.hpp"

#include <openssl/crypto.h>

#include <string>

#include "eaia/error.hpp"
#include "eaia/group/hash.hpp"

namespace eaia::protocol {

using group::GroupPoint;
using group::Scalar;
using group::SystemParams;

namespace {

constexpr int kMaxSignatureDraws = 64;

class WipeOnExit {
 public:
  explicit WipeOnExit(EphemeralState& eph) : eph_(eph) {}
  ~WipeOnExit() { eph_.wipe(); }
  WipeOnExit(const WipeOnExit&) = delete;
  WipeOnExit& operator=(const WipeOnExit&) = delete;

 private:
  EphemeralState& eph_;
};

bool equal_ct(ByteView a, ByteView b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

void require_fresh(Timestamp t, Timestamp now, std::uint64_t window_ms, const char* what) {
  if (!is_fresh(t, now, window_ms)) {
    fail(ErrorKind::StaleTimestamp, std::string(what) + " outside freshness window");
  }
}

// Decodes a point that the signature check depends on; any decode failure
// is reported as the check failing.
GroupPoint signed_point(const group::Group& g, ByteView enc, ErrorKind kind, const char* what) {
  try {
    return g.decode_point(enc);
  } catch (const Error& e) {
    fail(kind, std::string(what) + " is not a group element (" + e.what() + ")");
  }
}

Scalar signed_scalar(const group::Group& g, ByteView enc) {
  try {
    Scalar s = g.decode_scalar(enc);
    if (!s.is_zero()) return s;
  } catch (const Error&) {
  }
  fail(ErrorKind::SignatureInvalid, "sigma outside [1, q-1]");
}

}  // namespace

bool ReplayCache::contains(const Bytes& digest, Timestamp now) {
  prune(now);
  return expiry_.contains(digest);
}

void ReplayCache::insert(const Bytes& digest, Timestamp now) {
  prune(now);
  expiry_[digest] = now.ms + retention_ms_;
}

void ReplayCache::prune(Timestamp now) {
  std::erase_if(expiry_, [&](const auto& entry) { return entry.second < now.ms; });
}

Scalar sign(const group::Group& g, const Scalar& b, const Pseudonym& id, const GroupPoint& A,
            Timestamp t, const Scalar& y) {
  const Scalar h = group::h1_scalar(g, concat(id.view(), A.bytes(), be64(t.ms)));
  return g.scalar_mul(g.scalar_inv(b), g.scalar_add(h, y));
}

bool verify_signature(const group::Group& g, const Scalar& sigma, const GroupPoint& B,
                      const Pseudonym& id, const GroupPoint& A, Timestamp t, const GroupPoint& Y) {
  const Scalar h = group::h1_scalar(g, concat(id.view(), A.bytes(), be64(t.ms)));
  return g.point_mul(sigma, B) == g.point_add(g.mul_generator(h), Y);
}

Scalar session_binding(const group::Group& g, const Pseudonym& id_i, const Pseudonym& id_j,
                       const GroupPoint& A, const GroupPoint& D, Timestamp t_b) {
  return group::h1_scalar(g,
                          concat(id_i.view(), id_j.view(), A.bytes(), D.bytes(), be64(t_b.ms)));
}

SessionKey derive_session_key(const SystemParams& params, const Pseudonym& id_i,
                              const Pseudonym& id_j, const GroupPoint& shared) {
  return SessionKey(
      group::h3_key(concat(id_i.view(), id_j.view(), shared.bytes()), params.session_key_bits));
}

Bytes response_tag(const SystemParams& params, const Pseudonym& id_i, const Pseudonym& id_j,
                   const SessionKey& sk, Timestamp t_b) {
  return group::h4_tag(concat(id_i.view(), id_j.view(), sk.bytes(), be64(t_b.ms)),
                       params.tag_bits);
}

Bytes challenge_digest(const SystemParams& params, const ChallengeMsg& msg) {
  return group::h4_tag(encode_message(msg), params.tag_bits);
}

Bytes pseudonym_mask(const SystemParams& params, ByteView input) {
  return group::h_mask(input, params.mask_bits);
}

StaticKeyMaterial verify_registration(const SystemParams& params, const RegistrationReply& reply,
                                      const Scalar& x) {
  const group::Group& g = params.g();
  StaticKeyMaterial keys;
  keys.x = x;
  keys.y = reply.y;
  keys.X = g.mul_generator(x);
  keys.R = reply.R;
  keys.Y = reply.Y;
  keys.id = reply.id;

  const Scalar h = group::h1_scalar(g, concat(reply.id.view(), keys.X.bytes(), reply.R.bytes()));
  const GroupPoint expected = g.point_add(reply.R, g.point_mul(h, params.p_pub));
  if (g.mul_generator(reply.y) != expected) {
    fail(ErrorKind::RegistrationCheckFailed, "y*P != R + H*P_pub");
  }
  if (reply.Y != expected) fail(ErrorKind::RegistrationCheckFailed, "Y != R + H*P_pub");
  keys.combined = g.scalar_add(x, reply.y);
  return keys;
}

AuthRequest make_auth_request(const SystemParams& params, const StaticKeyMaterial& keys) {
  return AuthRequest{keys.id, params.g().point_add(keys.X, keys.Y).bytes()};
}

Challenge build_challenge(const SystemParams& params, const AuthRequest& request,
                          const StaticKeyMaterial& keys_i, Timestamp now, RandomSource& rng) {
  const group::Group& g = params.g();
  const GroupPoint peer_sum = g.decode_point(request.requester_pub_sum);

  Challenge out;
  EphemeralState& eph = out.state;
  eph.t_a = now;
  eph.peer_id = request.requester_id;
  eph.peer_pub_sum = peer_sum;
  Scalar sigma;
  for (int draw = 0;; ++draw) {
    if (draw == kMaxSignatureDraws) {
      fail(ErrorKind::DegenerateEphemeral, "no (a, b) produced a nonzero signature");
    }
    eph.a = g.random_nonzero(rng);
    eph.A = g.mul_generator(eph.a);
    eph.b = g.random_nonzero(rng);
    sigma = sign(g, eph.b, keys_i.id, eph.A, now, keys_i.y);
    if (!sigma.is_zero()) break;
    eph.a.wipe();
    eph.b.wipe();
  }

  const GroupPoint B = g.mul_generator(eph.b);
  const GroupPoint M = g.point_mul(eph.b, peer_sum);
  const Bytes plain = concat(keys_i.id.view(), eph.A.bytes());
  out.msg.B = B.bytes();
  out.msg.N = xor_bytes(group::h2_mask(M, plain.size() * 8), plain);
  out.msg.sigma = sigma.bytes();
  out.msg.t_a = now;
  return out;
}

ResponderOutcome process_challenge(const SystemParams& params, const ChallengeMsg& msg,
                                   const StaticKeyMaterial& keys_j, const PeerDirectory& directory,
                                   Timestamp now, std::uint64_t window_ms, RandomSource& rng,
                                   ReplayCache* replay) {
  const group::Group& g = params.g();
  require_fresh(msg.t_a, now, window_ms, "T_a");

  Bytes digest;
  if (replay != nullptr) {
    digest = challenge_digest(params, msg);
    if (replay->contains(digest, now)) fail(ErrorKind::ReplayDetected, "challenge seen before");
  }

  const GroupPoint B = signed_point(g, msg.B, ErrorKind::SignatureInvalid, "B");
  const Scalar sigma = signed_scalar(g, msg.sigma);
  if (msg.N.size() != kIdBytes + g.point_bytes()) {
    fail(ErrorKind::SignatureInvalid, "N has the wrong width");
  }

  // M' = (x_j + y_j) B recovers the mask; (ID_i' || A') = h2(M') xor N.
  const GroupPoint M = g.point_mul(keys_j.combined, B);
  const Bytes plain = xor_bytes(group::h2_mask(M, msg.N.size() * 8), msg.N);
  const Pseudonym peer = Pseudonym::from_bytes(ByteView(plain).first(kIdBytes));
  const GroupPoint A =
      signed_point(g, ByteView(plain).subspan(kIdBytes), ErrorKind::SignatureInvalid, "A'");

  const auto peer_keys = directory.find(peer);
  if (!peer_keys) {
    const Scalar h = group::h1_scalar(g, concat(peer.view(), A.bytes(), be64(msg.t_a.ms)));
    const GroupPoint implied_Y = g.point_sub(g.point_mul(sigma, B), g.mul_generator(h));
    if (directory.has_public_key(implied_Y)) {
      fail(ErrorKind::UnknownPeer, "signature valid but pseudonym not registered");
    }
    fail(ErrorKind::SignatureInvalid, "no registered key satisfies the signature");
  }
  if (!verify_signature(g, sigma, B, peer, A, msg.t_a, peer_keys->Y)) {
    fail(ErrorKind::SignatureInvalid, "sigma*B != h1(ID||A||T_a)*P + Y");
  }

  Scalar d = g.random_nonzero(rng);
  const GroupPoint D = g.mul_generator(d);
  const Timestamp t_b = now;
  const Scalar k = session_binding(g, peer, keys_j.id, A, D, t_b);
  // d (k A' + X_i)
  const GroupPoint shared = g.point_mul(d, g.point_add(g.point_mul(k, A), peer_keys->X));
  d.wipe();

  ResponderOutcome out;
  out.key = derive_session_key(params, peer, keys_j.id, shared);
  out.peer = peer;
  out.msg.D = D.bytes();
  out.msg.eta = response_tag(params, peer, keys_j.id, out.key, t_b);
  out.msg.t_b = t_b;
  if (replay != nullptr) replay->insert(digest, now);
  return out;
}

SessionKey finalize(const SystemParams& params, const ResponseMsg& msg, EphemeralState& eph,
                    const StaticKeyMaterial& keys_i, Timestamp now, std::uint64_t window_ms) {
  WipeOnExit guard(eph);
  const group::Group& g = params.g();
  require_fresh(msg.t_b, now, window_ms, "T_b");

  const GroupPoint D = signed_point(g, msg.D, ErrorKind::TagMismatch, "D");
  const Scalar k = session_binding(g, keys_i.id, eph.peer_id, eph.A, D, msg.t_b);
  Scalar exponent = g.scalar_add(g.scalar_mul(k, eph.a), keys_i.x);
  const GroupPoint shared = g.point_mul(exponent, D);
  exponent.wipe();

  SessionKey sk = derive_session_key(params, keys_i.id, eph.peer_id, shared);
  const Bytes eta = response_tag(params, keys_i.id, eph.peer_id, sk, msg.t_b);
  if (!equal_ct(eta, msg.eta)) fail(ErrorKind::TagMismatch, "eta does not match derived key");
  return sk;
}

PseudonymUpdateRequest pseudonym_update_request(const SystemParams& params,
                                                const StaticKeyMaterial& keys, Timestamp now,
                                                RandomSource& rng) {
  const group::Group& g = params.g();
  for (int draw = 0; draw < kMaxSignatureDraws; ++draw) {
    Scalar a = g.random_nonzero(rng);
    const GroupPoint A = g.mul_generator(a);
    a.wipe();
    Scalar b = g.random_nonzero(rng);
    const Scalar sigma = sign(g, b, keys.id, A, now, keys.y);
    if (sigma.is_zero()) {
      b.wipe();
      continue;
    }
    PseudonymUpdateRequest req;
    req.sigma = sigma.bytes();
    req.B = g.mul_generator(b).bytes();
    req.A = A.bytes();
    req.id = keys.id;
    req.R = keys.R.bytes();
    req.t = now;
    b.wipe();
    return req;
  }
  fail(ErrorKind::DegenerateEphemeral, "no (a, b) produced a nonzero signature");
}

Pseudonym pseudonym_update_finalize(const SystemParams& params, const PseudonymUpdateReply& reply,
                                    StaticKeyMaterial& keys, Timestamp now,
                                    std::uint64_t window_ms) {
  require_fresh(reply.t_c, now, window_ms, "T_c");
  if (reply.Q.size() != kIdBytes) fail(ErrorKind::MalformedMessage, "Q has the wrong width");
  const Pseudonym next =
      Pseudonym::from_bytes(xor_bytes(reply.Q, pseudonym_mask(params, keys.y.bytes())));
  keys.id = next;
  return next;
}

}  // namespace eaia::protocol
