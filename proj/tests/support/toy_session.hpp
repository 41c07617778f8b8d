#pragma once

#include <string>

#include "eaia/group/hash.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace testing_support {

// One toy-backend session with scripted ephemerals a, b (initiator) and d
// (responder), every intermediate value recomputed with the reference
// arithmetic. Returns an empty string when everything agrees.
inline std::string check_toy_session(const World& w, std::size_t i, std::size_t j, int a, int b,
                                     int d, std::uint64_t t) {
  using namespace eaia;
  namespace o = oracle;
  const auto& params = w.params();
  const auto& ki = w.keys[i];
  const auto& kj = w.keys[j];

  const o::Pt G = o::generator();
  const o::Pt Xi = *o::dec(ki.X.bytes());
  const o::Pt Yi = *o::dec(ki.Y.bytes());
  const o::Pt Xj = *o::dec(kj.X.bytes());
  const o::Pt Yj = *o::dec(kj.Y.bytes());
  const int xi = o::sc(ki.x);
  const int yi = o::sc(ki.y);
  const int xj = o::sc(kj.x);
  const int yj = o::sc(kj.y);
  const Bytes id_i = ki.id.bytes();
  const Bytes id_j = kj.id.bytes();

  if (o::mul(xi, G) != Xi || o::mul(yi, G) != Yi) return "initiator keys inconsistent";
  if (o::mul(xj, G) != Xj || o::mul(yj, G) != Yj) return "responder keys inconsistent";

  const o::Pt A = o::mul(a, G);
  const o::Pt B = o::mul(b, G);
  const int h = o::h1(o::cat({id_i, o::enc(A), o::be64(t)}));

  const auto req = protocol::make_auth_request(params, kj);
  ScriptedRandom rng_i{static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)};
  if (o::modq(h + yi) == 0) {
    // Zero for every b; the redraw then runs the script dry.
    const auto kind = error_of(
        [&] { (void)protocol::build_challenge(params, req, ki, {t}, rng_i); });
    return kind == ErrorKind::DegenerateEphemeral ? "" : "zero sigma not refused";
  }
  auto ch = protocol::build_challenge(params, req, ki, {t}, rng_i);

  // Eq. 1 on both sides of the channel: b (X_j + Y_j) = (x_j + y_j) B.
  const o::Pt M = o::mul(b, o::add(Xj, Yj));
  if (M != o::mul(xj + yj, B)) return "masking identity";
  const int sigma = o::modq(static_cast<long>(o::inv_mod(b, o::kQ)) * (h + yi));
  // Eq. 2: sigma B = h P + Y_i.
  if (o::mul(sigma, B) != o::add(o::mul(h, G), Yi)) return "signature identity";

  const Bytes plain = o::cat({id_i, o::enc(A)});
  if (ch.msg.B != o::enc(B)) return "B";
  if (ch.msg.N != o::xor_bytes(o::h2(M, plain.size() * 8), plain)) return "N";
  if (ch.msg.sigma != o::scalar_byte(sigma)) return "sigma";
  if (ch.msg.t_a.ms != t) return "T_a";

  ScriptedRandom rng_j{static_cast<std::uint64_t>(d)};
  protocol::ReplayCache cache;
  const auto out = protocol::process_challenge(params, ch.msg, kj, w.amf, {t}, 500, rng_j, &cache);
  if (out.peer != ki.id) return "recovered peer";

  const o::Pt D = o::mul(d, G);
  const int k = o::h1(o::cat({id_i, id_j, o::enc(A), o::enc(D), o::be64(t)}));
  // Eq. 3: d (k A + X_i) = (k a + x_i) D.
  const o::Pt shared = o::mul(d, o::add(o::mul(k, A), Xi));
  if (shared != o::mul(static_cast<long>(k) * a + xi, D)) return "key agreement identity";

  const Bytes sk = o::h3(o::cat({id_i, id_j, o::enc(shared)}));
  const Bytes eta = o::h4(o::cat({id_i, id_j, sk, o::be64(t)}));
  if (out.msg.D != o::enc(D)) return "D";
  if (out.key.bytes() != sk) return "responder SK";
  if (out.msg.eta != eta) return "eta";

  const auto sk_i = protocol::finalize(params, out.msg, ch.state, ki, {t}, 500);
  if (sk_i.bytes() != sk) return "initiator SK";
  if (!ch.state.zeroized()) return "ephemeral not wiped";
  return "";
}

}  // namespace testing_support
