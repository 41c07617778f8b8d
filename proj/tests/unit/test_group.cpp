#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "eaia/error.hpp"
#include "eaia/group/group.hpp"
#include "eaia/group/hash.hpp"
#include "eaia/random.hpp"
#include "oracle.hpp"

using namespace eaia;
using eaia::group::make_group;

namespace {

const auto toy = make_group("toy");
const auto p256 = make_group("production");

group::GroupPoint toy_point(const oracle::Pt& p) { return toy->decode_point(oracle::enc(p)); }

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an eaia::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("toy curve has the expected shape", "[group][toy]") {
  const auto pts = oracle::all_points();
  REQUIRE(pts.size() == 19);  // prime order, so every non-identity point generates
  CHECK(toy->scalar_bytes() == 1);
  CHECK(toy->point_bytes() == 3);
  CHECK(toy->generator().bytes() == oracle::enc(oracle::generator()));
  CHECK(toy->order() == Bytes{19});
  CHECK(toy->name() == "toy17");
}

TEST_CASE("toy scalar multiples match the reference for every k", "[group][toy]") {
  for (int k = 0; k < oracle::kQ; ++k) {
    const auto expected = oracle::mul(k, oracle::generator());
    CHECK(toy->mul_generator(toy->from_u64(k)).bytes() == oracle::enc(expected));
  }
}

TEST_CASE("toy point addition is exhaustive against the reference", "[group][toy]") {
  const auto pts = oracle::all_points();
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      const auto got = toy->point_add(toy_point(a), toy_point(b));
      REQUIRE(got.bytes() == oracle::enc(oracle::add(a, b)));
    }
    CHECK(toy->point_neg(toy_point(a)).bytes() == oracle::enc(oracle::neg(a)));
  }
}

TEST_CASE("toy point_mul is exhaustive against the reference", "[group][toy]") {
  for (const auto& pt : oracle::all_points()) {
    for (int k = 0; k < oracle::kQ; ++k) {
      REQUIRE(toy->point_mul(toy->from_u64(k), toy_point(pt)).bytes() ==
              oracle::enc(oracle::mul(k, pt)));
    }
  }
}

TEST_CASE("toy scalar field arithmetic", "[group][toy]") {
  for (int a = 0; a < oracle::kQ; ++a) {
    for (int b = 0; b < oracle::kQ; ++b) {
      const auto sa = toy->from_u64(a);
      const auto sb = toy->from_u64(b);
      REQUIRE(oracle::sc(toy->scalar_add(sa, sb)) == oracle::modq(a + b));
      REQUIRE(oracle::sc(toy->scalar_sub(sa, sb)) == oracle::modq(a - b));
      REQUIRE(oracle::sc(toy->scalar_mul(sa, sb)) == oracle::modq(a * b));
    }
    if (a != 0) {
      CHECK(oracle::sc(toy->scalar_inv(toy->from_u64(a))) == oracle::inv_mod(a, oracle::kQ));
    }
  }
  CHECK(kind_of([] { (void)toy->scalar_inv(toy->zero()); }) == ErrorKind::ZeroScalar);
}

TEST_CASE("toy decode accepts exactly the curve points", "[group][toy]") {
  std::size_t accepted = 0;
  for (int p0 = 0; p0 < 256; ++p0) {
    for (int p1 = 0; p1 < 256; ++p1) {
      for (int p2 = 0; p2 < 32; ++p2) {
        const Bytes enc{static_cast<std::uint8_t>(p0), static_cast<std::uint8_t>(p1),
                        static_cast<std::uint8_t>(p2)};
        const auto want = oracle::dec(enc);
        try {
          const auto got = toy->decode_point(enc);
          REQUIRE(want.has_value());
          ++accepted;
        } catch (const Error& e) {
          REQUIRE_FALSE(want.has_value());
          REQUIRE(e.kind() == ErrorKind::MalformedPoint);
        }
      }
    }
  }
  CHECK(accepted == 19);
  CHECK(kind_of([] { (void)toy->decode_point(Bytes{0x04, 5}); }) == ErrorKind::MalformedPoint);
}

TEST_CASE("toy scalar decode range", "[group][toy]") {
  for (int v = 0; v < 256; ++v) {
    const Bytes enc{static_cast<std::uint8_t>(v)};
    if (v < oracle::kQ) {
      CHECK(oracle::sc(toy->decode_scalar(enc)) == v);
    } else {
      CHECK(kind_of([&] { (void)toy->decode_scalar(enc); }) == ErrorKind::MalformedScalar);
    }
  }
  CHECK(kind_of([] { (void)toy->decode_scalar(Bytes{1, 2}); }) == ErrorKind::MalformedScalar);
}

TEST_CASE("toy reduce matches big-endian residue", "[group][toy]") {
  SeededRandom rng(5);
  for (int i = 0; i < 500; ++i) {
    Bytes wide(17);
    rng.fill(wide);
    CHECK(oracle::sc(toy->reduce(wide)) == oracle::reduce_be(wide, oracle::kQ));
  }
}

TEST_CASE("random_nonzero covers [1, q-1] and never yields zero", "[group][toy]") {
  SeededRandom rng(9);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = oracle::sc(toy->random_nonzero(rng));
    REQUIRE(v != 0);
    seen.insert(v);
  }
  CHECK(seen.size() == 18);

  ScriptedRandom zeros{0, 0, 0};
  CHECK(kind_of([&] { (void)toy->random_nonzero(zeros); }) == ErrorKind::DegenerateEphemeral);
  ScriptedRandom scripted{19 + 7};
  CHECK(oracle::sc(toy->random_nonzero(scripted)) == 7);
}

TEST_CASE("P-256 generator multiples match published coordinates", "[group][p256]") {
  const auto G = p256->generator();
  CHECK(to_hex(G.bytes()) ==
        "04"
        "6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"
        "4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5");
  CHECK(to_hex(p256->mul_generator(p256->from_u64(2)).bytes()) ==
        "04"
        "7cf27b188d034f7e8a52380304b51ac3c08969e277f21b35a60b48fc47669978"
        "07775510db8ed040293d9ac69f7430dbba7dade63ce982299e04b79d227873d1");
  CHECK(to_hex(p256->mul_generator(p256->from_u64(3)).bytes()) ==
        "04"
        "5ecbe4d1a6330a44c8f7ef951d4bf165e6c6b721efada985fb41661bc6e7fd6c"
        "8734640c4998ff7e374b06ce1a64a2ecd82ab036384fb83d9a79b127a27d5032");
  CHECK(to_hex(p256->mul_generator(p256->from_u64(0xdeadbeef)).bytes()) ==
        "04"
        "b487d183dc4806058eb31a29bedefd7bcca987b77a381a3684871d8449c18394"
        "2a122cc711a80453678c3032de4b6fff2c86342e82d1e7adb617c4165c43ce5e");
  CHECK(to_hex(p256->order()) ==
        "ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
  CHECK(p256->point_bytes() == 65);
  CHECK(p256->scalar_bytes() == 32);
}

TEST_CASE("P-256 algebraic identities on random scalars", "[group][p256]") {
  SeededRandom rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto a = p256->random_nonzero(rng);
    const auto b = p256->random_nonzero(rng);
    const auto A = p256->mul_generator(a);
    const auto B = p256->mul_generator(b);
    CHECK(p256->point_add(A, B) == p256->mul_generator(p256->scalar_add(a, b)));
    CHECK(p256->point_mul(a, B) == p256->point_mul(b, A));
    CHECK(p256->scalar_mul(a, p256->scalar_inv(a)) == p256->one());
    CHECK(p256->point_add(A, p256->point_neg(A)).is_identity());
    CHECK(p256->decode_point(A.bytes()) == A);
    CHECK(p256->decode_scalar(a.bytes()) == a);
  }
  CHECK(p256->point_mul(p256->zero(), p256->generator()).is_identity());
}

TEST_CASE("P-256 decode rejects off-curve and mis-sized encodings", "[group][p256]") {
  SeededRandom rng(23);
  int rejected = 0;
  for (int i = 0; i < 300; ++i) {
    Bytes enc(65);
    rng.fill(enc);
    enc[0] = 0x04;
    try {
      (void)p256->decode_point(enc);
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::MalformedPoint);
      ++rejected;
    }
  }
  CHECK(rejected == 300);

  auto G = p256->generator().bytes();
  G[64] ^= 1;
  CHECK(kind_of([&] { (void)p256->decode_point(G); }) == ErrorKind::MalformedPoint);
  CHECK(kind_of([] { (void)p256->decode_point(Bytes(33, 2)); }) == ErrorKind::MalformedPoint);
  CHECK(kind_of([] { (void)p256->decode_scalar(Bytes(32, 0xff)); }) == ErrorKind::MalformedScalar);
}

TEST_CASE("identity encodes as zero bytes of point width", "[group]") {
  CHECK(toy->identity().bytes() == Bytes(3, 0));
  CHECK(p256->identity().bytes() == Bytes(65, 0));
  CHECK(toy->decode_point(Bytes(3, 0)).is_identity());
}
