#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "eaia/group/hash.hpp"
#include "eaia/random.hpp"
#include "oracle.hpp"

using namespace eaia;
using namespace eaia::group;

namespace {
Bytes ascii(const std::string& s) { return Bytes(s.begin(), s.end()); }
}  // namespace

TEST_CASE("shake256 with domain tag matches an external vector", "[hash]") {
  // python3: hashlib.shake_256(b'\x01' + b'abc').hexdigest(32)
  CHECK(to_hex(shake256(HashDomain::Scalar, ascii("abc"), 32)) ==
        "546705560fb5c48f0e520f7d193025c31ebfb6105159b6c907e9be87fe482130");
  // python3: hashlib.shake_256(b'\x03').hexdigest(32)
  CHECK(to_hex(shake256(HashDomain::SessionKey, {}, 32)) ==
        "db4252337900d8ab7f609d170135d459a6798945d5a574d4a9db7b623c754d07");
}

TEST_CASE("domains separate identical inputs", "[hash]") {
  const auto in = ascii("same bytes");
  const auto a = h3_key(in, 256);
  const auto b = h4_tag(in, 256);
  const auto c = h_mask(in, 256);
  CHECK(a != b);
  CHECK(b != c);
  CHECK(a != c);
}

TEST_CASE("bit widths truncate and stay prefix-consistent", "[hash]") {
  const auto in = ascii("width");
  const auto full = h3_key(in, 256);
  CHECK(full.size() == 32);
  const auto twelve = h3_key(in, 12);
  REQUIRE(twelve.size() == 2);
  CHECK(twelve[0] == full[0]);
  CHECK(twelve[1] == (full[1] & 0xf0));

  const auto toy = make_group("toy");
  const auto P = toy->generator();
  const auto long_mask = h2_mask(P, 35 * 8);
  const auto short_mask = h2_mask(P, 16 * 8);
  CHECK(Bytes(long_mask.begin(), long_mask.begin() + 16) == short_mask);
}

TEST_CASE("h1 onto the toy group matches the reference construction", "[hash][toy]") {
  const auto toy = make_group("toy");
  SeededRandom rng(3);
  for (int i = 0; i < 400; ++i) {
    Bytes in(static_cast<std::size_t>(i % 70));
    rng.fill(in);
    const int got = oracle::sc(h1_scalar(*toy, in));
    REQUIRE(got == oracle::h1(in));
    REQUIRE(got != 0);
  }
}

TEST_CASE("h1 onto P-256 is nonzero and input-sensitive", "[hash][p256]") {
  const auto g = make_group("production");
  const auto a = h1_scalar(*g, ascii("a"));
  const auto b = h1_scalar(*g, ascii("b"));
  CHECK_FALSE(a.is_zero());
  CHECK(a != b);
  CHECK(a == h1_scalar(*g, ascii("a")));
}
