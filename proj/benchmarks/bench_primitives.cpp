#include <benchmark/benchmark.h>

#include "eaia/authority/authority.hpp"
#include "eaia/group/hash.hpp"
#include "eaia/protocol/protocol.hpp"
#include "eaia/protocol/wire.hpp"

using namespace eaia;
using namespace eaia::protocol;

namespace {

struct Fixture {
  authority::Authority amf;
  StaticKeyMaterial i;
  StaticKeyMaterial j;
};

Fixture make_fixture(const std::string& backend) {
  SeededRandom rng(42);
  auto amf = authority::Authority::setup(group::make_group(backend), {}, rng);
  const auto& g = amf.params().g();
  auto enroll = [&](const char* vin) {
    const auto x = g.random_nonzero(rng);
    const auto reply = amf.register_vehicle(real_id_from_vin(vin), g.mul_generator(x).bytes(), {0}, rng);
    return verify_registration(amf.params(), reply, x);
  };
  auto i = enroll("BENCH-I");
  auto j = enroll("BENCH-J");
  return {std::move(amf), std::move(i), std::move(j)};
}

const Fixture& p256() {
  static const Fixture f = make_fixture("production");
  return f;
}

void BM_ScalarMul(benchmark::State& state) {
  const auto& g = p256().amf.params().g();
  SeededRandom rng(1);
  const auto k = g.random_nonzero(rng);
  const auto pt = p256().i.X;
  for (auto _ : state) benchmark::DoNotOptimize(g.point_mul(k, pt));
}
BENCHMARK(BM_ScalarMul);

void BM_PointAdd(benchmark::State& state) {
  const auto& g = p256().amf.params().g();
  for (auto _ : state) benchmark::DoNotOptimize(g.point_add(p256().i.X, p256().j.Y));
}
BENCHMARK(BM_PointAdd);

void BM_H1(benchmark::State& state) {
  const auto& g = p256().amf.params().g();
  const Bytes input(137, 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(group::h1_scalar(g, input));
}
BENCHMARK(BM_H1);

void BM_BuildChallenge(benchmark::State& state) {
  const auto& f = p256();
  SeededRandom rng(2);
  const auto req = make_auth_request(f.amf.params(), f.j);
  for (auto _ : state) benchmark::DoNotOptimize(build_challenge(f.amf.params(), req, f.i, {1}, rng));
}
BENCHMARK(BM_BuildChallenge);

void BM_FullAuthentication(benchmark::State& state) {
  const auto& f = p256();
  const auto& p = f.amf.params();
  SeededRandom rng(3);
  for (auto _ : state) {
    const auto req = make_auth_request(p, f.j);
    auto ch = build_challenge(p, req, f.i, {1}, rng);
    const auto out = process_challenge(p, ch.msg, f.j, f.amf, {1}, kDefaultWindowMs, rng);
    benchmark::DoNotOptimize(finalize(p, out.msg, ch.state, f.i, {1}, kDefaultWindowMs));
  }
}
BENCHMARK(BM_FullAuthentication)->Unit(benchmark::kMillisecond);

void BM_EncodeDecodeChallenge(benchmark::State& state) {
  const auto& f = p256();
  const auto& p = f.amf.params();
  SeededRandom rng(4);
  const auto ch = build_challenge(p, make_auth_request(p, f.j), f.i, {1}, rng);
  const auto profile = WireProfile::from(p);
  for (auto _ : state) benchmark::DoNotOptimize(decode_message(encode_message(ch.msg), profile));
}
BENCHMARK(BM_EncodeDecodeChallenge);

}  // namespace
BENCHMARK_MAIN();
