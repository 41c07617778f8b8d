#include "eaia/group/params.hpp"

#include <string>

#include "eaia/error.hpp"

namespace eaia::group {

namespace {

void check_width(std::size_t bits, const char* what) {
  if (bits == 0 || bits % 8 != 0) {
    fail(ErrorKind::InvalidArgument,
         std::string(what) + " must be a positive multiple of 8, got " + std::to_string(bits));
  }
}

}  // namespace

void SystemParams::validate() const {
  if (!group) fail(ErrorKind::InvalidArgument, "system parameters without a group");
  check_width(session_key_bits, "session key length");
  check_width(tag_bits, "tag length");
  check_width(mask_bits, "mask width");
  if (mask_bits != 256) fail(ErrorKind::InvalidArgument, "pseudonym mask width must be 256");
  const GroupPoint decoded = group->decode_point(p_pub.bytes());
  if (decoded.is_identity()) fail(ErrorKind::MalformedPoint, "authority public key is identity");
}

}  // namespace eaia::group
