#pragma once

#include <string>

#include "eaia/group/hash.hpp"
#include "fixtures.hpp"
#include "tap_random.hpp"

namespace testing_support {

// Seeded session on any backend. The responder's d is rebuilt from the
// tapped draw so all three identities can be checked with group operations
// outside the protocol code. Returns an empty string on success.
inline std::string check_session(const World& w, std::size_t i, std::size_t j, std::uint64_t seed,
                                 std::uint64_t t) {
  using namespace eaia;
  const auto& params = w.params();
  const auto& g = w.g();
  const auto& ki = w.keys[i];
  const auto& kj = w.keys[j];

  SeededRandom rng_i(seed);
  TapRandom rng_j(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto req = protocol::make_auth_request(params, kj);
  auto ch = protocol::build_challenge(params, req, ki, {t}, rng_i);
  protocol::ReplayCache cache;
  const auto out = protocol::process_challenge(params, ch.msg, kj, w.amf, {t}, 500, rng_j, &cache);
  if (rng_j.draws.size() != 1) return "responder drew more than one scalar";

  const auto a = ch.state.a;
  const auto b = ch.state.b;
  const auto d = g.reduce(rng_j.draws[0]);
  const auto B = g.decode_point(ch.msg.B);
  const auto D = g.decode_point(out.msg.D);
  const auto sigma = g.decode_scalar(ch.msg.sigma);

  // (1) b (X_j + Y_j) = (x_j + y_j) B
  if (g.point_mul(b, g.point_add(kj.X, kj.Y)) !=
      g.point_mul(g.scalar_add(kj.x, kj.y), B)) {
    return "identity (1)";
  }
  // (2) sigma B = h1(ID_i || A || T_a) P + Y_i
  const Bytes sig_in = concat(ki.id.view(), ch.state.A.bytes(), be64(t));
  if (g.point_mul(sigma, B) != g.point_add(g.mul_generator(group::h1_scalar(g, sig_in)), ki.Y)) {
    return "identity (2)";
  }
  // (3) d (k A + X_i) = (k a + x_i) D
  const auto k = group::h1_scalar(
      g, concat(ki.id.view(), kj.id.view(), ch.state.A.bytes(), D.bytes(), be64(t)));
  const auto lhs = g.point_mul(d, g.point_add(g.point_mul(k, ch.state.A), ki.X));
  const auto rhs = g.point_mul(g.scalar_add(g.scalar_mul(k, a), ki.x), D);
  if (lhs != rhs) return "identity (3)";

  const auto sk_i = protocol::finalize(params, out.msg, ch.state, ki, {t}, 500);
  if (sk_i.bytes() != out.key.bytes()) return "session keys differ";
  if (sk_i.bytes().size() * 8 != params.session_key_bits) return "session key width";
  return "";
}

}  // namespace testing_support
