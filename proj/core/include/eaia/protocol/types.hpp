#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "eaia/bytes.hpp"
#include "eaia/group/group.hpp"

namespace eaia::protocol {

inline constexpr std::size_t kIdBytes = 32;

// Fixed 256-bit identifier. The tag keeps real identities and pseudonyms
// from being mixed up.
template <typename Tag>
class Id256 {
 public:
  Id256() { value_.fill(0); }

  // Throws std::invalid_argument unless exactly 32 bytes.
  static Id256 from_bytes(ByteView data) {
    if (data.size() != kIdBytes) throw std::invalid_argument("identifier must be 256 bits");
    Id256 id;
    std::copy(data.begin(), data.end(), id.value_.begin());
    return id;
  }

  static Id256 from_hex(std::string_view hex) { return from_bytes(eaia::from_hex(hex)); }

  ByteView view() const { return value_; }
  Bytes bytes() const { return Bytes(value_.begin(), value_.end()); }
  std::string hex() const { return to_hex(value_); }

  friend bool operator==(const Id256&, const Id256&) = default;
  friend auto operator<=>(const Id256&, const Id256&) = default;

 private:
  std::array<std::uint8_t, kIdBytes> value_;
};

struct RealIdTag {};
struct PseudonymTag {};
using RealId = Id256<RealIdTag>;
using Pseudonym = Id256<PseudonymTag>;

struct Timestamp {
  std::uint64_t ms = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// |now - t| <= window_ms
bool is_fresh(Timestamp t, Timestamp now, std::uint64_t window_ms);

// RID derived from a vehicle identification number.
RealId real_id_from_vin(std::string_view vin);

struct PublicKeyPair {
  group::GroupPoint X;
  group::GroupPoint Y;
};

// What the authority returns over the registration channel.
struct RegistrationReply {
  group::Scalar y;
  group::GroupPoint R;
  group::GroupPoint Y;
  Pseudonym id;
};

// Long-term vehicle keys. X = x*P, Y = y*P = R + H*P_pub and
// combined = x + y mod q.
struct StaticKeyMaterial {
  group::Scalar x;
  group::Scalar y;
  group::Scalar combined;
  group::GroupPoint X;
  group::GroupPoint Y;
  group::GroupPoint R;
  Pseudonym id;

  PublicKeyPair public_keys() const { return {X, Y}; }
};

// Challenger-side per-session secrets. Lives only in memory and is wiped when
// the session finishes either way.
class EphemeralState {
 public:
  EphemeralState() = default;
  EphemeralState(const EphemeralState&) = delete;
  EphemeralState& operator=(const EphemeralState&) = delete;
  EphemeralState(EphemeralState&&) noexcept = default;
  EphemeralState& operator=(EphemeralState&&) noexcept = default;
  ~EphemeralState() { wipe(); }

  group::Scalar a;
  group::Scalar b;
  group::GroupPoint A;
  Timestamp t_a;
  Pseudonym peer_id;
  group::GroupPoint peer_pub_sum;

  void wipe();
  // Test hook: true once a and b hold only zero bytes.
  bool zeroized() const;
};

class SessionKey {
 public:
  SessionKey() = default;
  explicit SessionKey(Bytes key) : key_(std::move(key)) {}

  const Bytes& bytes() const { return key_; }
  bool empty() const { return key_.empty(); }

  friend bool operator==(const SessionKey&, const SessionKey&) = default;

 private:
  Bytes key_;
};

}  // namespace eaia::protocol

template <typename Tag>
struct std::hash<eaia::protocol::Id256<Tag>> {
  std::size_t operator()(const eaia::protocol::Id256<Tag>& id) const noexcept {
    std::size_t h = 0;
    for (std::uint8_t b : id.view()) h = h * 131 + b;
    return h;
  }
};
