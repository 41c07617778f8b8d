#include "eaia/protocol/types.hpp"

#include "eaia/group/hash.hpp"

namespace eaia::protocol {

bool is_fresh(Timestamp t, Timestamp now, std::uint64_t window_ms) {
  const std::uint64_t diff = t.ms > now.ms ? t.ms - now.ms : now.ms - t.ms;
  return diff <= window_ms;
}

RealId real_id_from_vin(std::string_view vin) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(vin.data());
  return RealId::from_bytes(group::h_mask(ByteView(data, vin.size()), kIdBytes * 8));
}

void EphemeralState::wipe() {
  a.wipe();
  b.wipe();
}

bool EphemeralState::zeroized() const { return a.is_zero() && b.is_zero(); }

}  // namespace eaia::protocol
