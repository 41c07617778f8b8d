#pragma once

// Independent reference arithmetic for the toy backend: y^2 = x^3 + 2x + 2
// over F_17 with G = (5, 1) of order 19. Plain ints and textbook affine
// formulas, sharing nothing with the library's group code.

#include <openssl/evp.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eaia/bytes.hpp"
#include "eaia/group/group.hpp"

namespace oracle {

inline constexpr int kP = 17;
inline constexpr int kQ = 19;
inline constexpr int kA = 2;
inline constexpr int kB = 2;

struct Pt {
  int x = 0;
  int y = 0;
  bool inf = true;
  friend bool operator==(const Pt&, const Pt&) = default;
};

inline Pt affine(int x, int y) { return Pt{x, y, false}; }
inline Pt generator() { return affine(5, 1); }

inline int modp(long v) { return static_cast<int>(((v % kP) + kP) % kP); }
inline int modq(long v) { return static_cast<int>(((v % kQ) + kQ) % kQ); }

inline int inv_mod(int v, int m) {
  for (int i = 1; i < m; ++i) {
    if ((static_cast<long>(v) * i) % m == 1) return i;
  }
  throw std::domain_error("no inverse");
}

inline bool on_curve(int x, int y) {
  return modp(static_cast<long>(y) * y) == modp(static_cast<long>(x) * x * x + kA * x + kB);
}

inline Pt neg(Pt a) { return a.inf ? a : affine(a.x, modp(-a.y)); }

inline Pt add(Pt a, Pt b) {
  if (a.inf) return b;
  if (b.inf) return a;
  if (a.x == b.x && modp(a.y + b.y) == 0) return Pt{};
  long lambda;
  if (a == b) {
    lambda = modp(static_cast<long>(3 * a.x * a.x + kA) * inv_mod(modp(2 * a.y), kP));
  } else {
    lambda = modp(static_cast<long>(b.y - a.y) * inv_mod(modp(b.x - a.x), kP));
  }
  const int x3 = modp(lambda * lambda - a.x - b.x);
  const int y3 = modp(lambda * (a.x - x3) - a.y);
  return affine(x3, y3);
}

// Repeated addition; k is small enough here.
inline Pt mul(long k, Pt a) {
  k = modq(k);
  Pt acc;
  for (long i = 0; i < k; ++i) acc = add(acc, a);
  return acc;
}

inline std::vector<Pt> all_points() {
  std::vector<Pt> out{Pt{}};
  for (int x = 0; x < kP; ++x) {
    for (int y = 0; y < kP; ++y) {
      if (on_curve(x, y)) out.push_back(affine(x, y));
    }
  }
  return out;
}

inline eaia::Bytes enc(Pt a) {
  if (a.inf) return {0, 0, 0};
  return {0x04, static_cast<std::uint8_t>(a.x), static_cast<std::uint8_t>(a.y)};
}

inline std::optional<Pt> dec(eaia::ByteView b) {
  if (b.size() != 3) return std::nullopt;
  if (b[0] == 0 && b[1] == 0 && b[2] == 0) return Pt{};
  if (b[0] != 0x04 || b[1] >= kP || b[2] >= kP || !on_curve(b[1], b[2])) return std::nullopt;
  return affine(b[1], b[2]);
}

inline int sc(const eaia::group::Scalar& s) {
  const auto& b = s.bytes();
  int v = 0;
  for (auto byte : b) v = v * 256 + byte;
  return v;
}

inline eaia::Bytes be64(std::uint64_t v) {
  eaia::Bytes out(8);
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return out;
}

inline eaia::Bytes cat(std::initializer_list<eaia::ByteView> parts) {
  eaia::Bytes out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// SHAKE256(tag || input), straight from the EVP interface.
inline eaia::Bytes shake(std::uint8_t tag, eaia::ByteView in, std::size_t n) {
  eaia::Bytes out(n);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr);
  EVP_DigestUpdate(ctx, &tag, 1);
  EVP_DigestUpdate(ctx, in.data(), in.size());
  if (n != 0) EVP_DigestFinalXOF(ctx, out.data(), n);
  EVP_MD_CTX_free(ctx);
  return out;
}

inline int reduce_be(eaia::ByteView b, int m) {
  int v = 0;
  for (auto byte : b) v = (v * 256 + byte) % m;
  return v;
}

// h1 onto [1, 18]: first nonzero residue among 17-byte chunks.
inline int h1(eaia::ByteView in) {
  constexpr std::size_t chunk = 17;
  for (std::uint64_t round = 0;; ++round) {
    eaia::Bytes seeded(in.begin(), in.end());
    if (round != 0) {
      const auto r = be64(round);
      seeded.insert(seeded.end(), r.begin(), r.end());
    }
    const auto stream = shake(0x01, seeded, chunk * 8);
    for (std::size_t i = 0; i < 8; ++i) {
      const int v = reduce_be(eaia::ByteView(stream).subspan(i * chunk, chunk), kQ);
      if (v != 0) return v;
    }
  }
}

inline eaia::Bytes xof(std::uint8_t tag, eaia::ByteView in, std::size_t bits) {
  auto out = shake(tag, in, (bits + 7) / 8);
  if (const std::size_t spare = out.size() * 8 - bits; spare != 0) {
    out.back() &= static_cast<std::uint8_t>(0xff << spare);
  }
  return out;
}

inline eaia::Bytes h2(Pt m, std::size_t bits) { return xof(0x02, enc(m), bits); }
inline eaia::Bytes h3(eaia::ByteView in) { return xof(0x03, in, 256); }
inline eaia::Bytes h4(eaia::ByteView in) { return xof(0x04, in, 256); }
inline eaia::Bytes hmask(eaia::ByteView in) { return xof(0x05, in, 256); }

inline eaia::Bytes xor_bytes(eaia::ByteView a, eaia::ByteView b) {
  eaia::Bytes out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

inline eaia::Bytes scalar_byte(int v) { return {static_cast<std::uint8_t>(v)}; }

}  // namespace oracle
