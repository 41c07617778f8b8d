#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "eaia/bytes.hpp"
#include "eaia/group/params.hpp"
#include "eaia/protocol/types.hpp"

namespace eaia::protocol {

// Wire layout
//
//   message := type:u8 field*
//   field   := tag:u8 length:u16be value[length]
//
// Fields appear in the fixed order listed for each struct, tagged 0x01, 0x02,
// ... in that order. Group elements and scalars travel as raw fixed-width
// encodings; decode checks framing and widths only and leaves curve
// membership and scalar range to the protocol step that consumes the field,
// so a corrupted element is rejected by the check it was meant to pass.

enum class MessageType : std::uint8_t {
  AuthRequest = 0x10,
  Challenge = 0x11,
  Response = 0x12,
  PseudonymUpdateRequest = 0x13,
  PseudonymUpdateReply = 0x14,
};

std::string_view to_string(MessageType type);

struct AuthRequest {
  Pseudonym requester_id;
  Bytes requester_pub_sum;  // X_j + Y_j

  friend bool operator==(const AuthRequest&, const AuthRequest&) = default;
};

struct ChallengeMsg {
  Bytes B;
  Bytes N;      // h2(M) xor (ID_i || A)
  Bytes sigma;
  Timestamp t_a;

  friend bool operator==(const ChallengeMsg&, const ChallengeMsg&) = default;
};

struct ResponseMsg {
  Bytes D;
  Bytes eta;
  Timestamp t_b;

  friend bool operator==(const ResponseMsg&, const ResponseMsg&) = default;
};

struct PseudonymUpdateRequest {
  Bytes sigma;
  Bytes B;
  Bytes A;
  Pseudonym id;
  Bytes R;
  Timestamp t;

  friend bool operator==(const PseudonymUpdateRequest&, const PseudonymUpdateRequest&) = default;
};

struct PseudonymUpdateReply {
  Bytes Q;  // h_mask(y) xor new pseudonym
  Timestamp t_c;

  friend bool operator==(const PseudonymUpdateReply&, const PseudonymUpdateReply&) = default;
};

using Message = std::variant<AuthRequest, ChallengeMsg, ResponseMsg, PseudonymUpdateRequest,
                             PseudonymUpdateReply>;

MessageType type_of(const Message& msg);

// Field widths for one parameter set.
struct WireProfile {
  std::size_t point_bytes = 0;
  std::size_t scalar_bytes = 0;
  std::size_t tag_bytes = 0;
  std::size_t id_bytes = kIdBytes;

  static WireProfile from(const group::SystemParams& params);

  std::size_t n_bytes() const { return id_bytes + point_bytes; }
};

inline constexpr std::size_t kTimestampBytes = 8;
inline constexpr std::size_t kFieldHeaderBytes = 3;

Bytes encode_message(const Message& msg);

// Throws MalformedMessage on truncation, unknown type or field tag, width
// mismatch, or trailing bytes.
Message decode_message(ByteView data, const WireProfile& profile);

// Encoded size of a message type under a profile.
std::size_t encoded_size(MessageType type, const WireProfile& profile);

// Raw view of one field's value inside an encoded message, for adversarial
// manipulation of well-framed frames.
struct FieldSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};
std::optional<FieldSpan> locate_field(ByteView frame, std::uint8_t field_tag);

// Field tag of a named field ("B", "N", "sigma", ...) in a message type.
std::optional<std::uint8_t> field_tag(MessageType type, std::string_view field);

std::optional<MessageType> peek_type(ByteView frame);

}  // namespace eaia::protocol
