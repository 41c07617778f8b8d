#include "eaia/group/hash.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace eaia::group {

namespace {

struct MdCtxFree {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};

Bytes xof_bits(HashDomain domain, ByteView input, std::size_t nbits) {
  if (nbits == 0) throw std::invalid_argument("hash output width must be positive");
  Bytes out = shake256(domain, input, (nbits + 7) / 8);
  if (const std::size_t spare = out.size() * 8 - nbits; spare != 0) {
    out.back() &= static_cast<std::uint8_t>(0xff << spare);
  }
  return out;
}

}  // namespace

Bytes shake256(HashDomain domain, ByteView input, std::size_t out_bytes) {
  std::unique_ptr<EVP_MD_CTX, MdCtxFree> ctx(EVP_MD_CTX_new());
  if (!ctx) throw std::bad_alloc();
  const std::uint8_t tag = static_cast<std::uint8_t>(domain);
  Bytes out(out_bytes);
  if (EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), &tag, 1) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      (out_bytes != 0 && EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1)) {
    throw std::runtime_error("openssl failure: shake256");
  }
  return out;
}

Scalar h1_scalar(const Group& g, ByteView input) {
  const std::size_t chunk = g.scalar_bytes() + 16;
  constexpr std::size_t kChunks = 8;
  for (std::size_t round = 0;; ++round) {
    Bytes seeded(input.begin(), input.end());
    if (round != 0) append(seeded, be64(round));
    const Bytes stream = shake256(HashDomain::Scalar, seeded, chunk * kChunks);
    for (std::size_t i = 0; i < kChunks; ++i) {
      Scalar s = g.reduce(ByteView(stream).subspan(i * chunk, chunk));
      if (!s.is_zero()) return s;
    }
  }
}

Bytes h2_mask(const GroupPoint& pt, std::size_t nbits) {
  return xof_bits(HashDomain::PointMask, pt.bytes(), nbits);
}

Bytes h3_key(ByteView input, std::size_t nbits) {
  return xof_bits(HashDomain::SessionKey, input, nbits);
}

Bytes h4_tag(ByteView input, std::size_t nbits) { return xof_bits(HashDomain::Tag, input, nbits); }

Bytes h_mask(ByteView input, std::size_t nbits) {
  return xof_bits(HashDomain::Mask, input, nbits);
}

}  // namespace eaia::group
