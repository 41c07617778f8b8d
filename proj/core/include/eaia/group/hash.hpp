#pragma once

#include <cstddef>
#include <cstdint>

#include "eaia/bytes.hpp"
#include "eaia/group/group.hpp"

namespace eaia::group {

// All protocol hashes are SHAKE256 with a one-byte domain tag prepended to
// the input, so no two profiles can collide on the same bytes.
enum class HashDomain : std::uint8_t {
  Scalar = 0x01,  // h1
  PointMask = 0x02,  // h2
  SessionKey = 0x03,  // h3
  Tag = 0x04,  // h4
  Mask = 0x05,  // XOR masks for pseudonyms
};

Bytes shake256(HashDomain domain, ByteView input, std::size_t out_bytes);

// h1: bytes -> [1, q-1]. Walks successive chunks of the XOF stream until a
// nonzero residue appears.
Scalar h1_scalar(const Group& g, ByteView input);

// h2: point -> nbits-wide mask. Prefix-consistent across lengths.
Bytes h2_mask(const GroupPoint& pt, std::size_t nbits);

Bytes h3_key(ByteView input, std::size_t nbits);
Bytes h4_tag(ByteView input, std::size_t nbits);
Bytes h_mask(ByteView input, std::size_t nbits);

}  // namespace eaia::group
