#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eaia {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);

// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

// Element-wise XOR; throws std::invalid_argument if widths differ.
Bytes xor_bytes(ByteView lhs, ByteView rhs);

void append(Bytes& out, ByteView data);

template <typename... Parts>
Bytes concat(const Parts&... parts) {
  Bytes out;
  (append(out, ByteView(parts)), ...);
  return out;
}

Bytes be64(std::uint64_t value);
std::uint64_t read_be64(ByteView data);

// Overwrites the buffer in a way the optimizer may not elide.
void secure_wipe(std::span<std::uint8_t> data);

// True if needle occurs as a contiguous run inside haystack.
bool contains_subsequence(ByteView haystack, ByteView needle);

}  // namespace eaia
