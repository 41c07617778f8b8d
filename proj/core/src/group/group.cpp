#include "eaia/group/group.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "eaia/error.hpp"

namespace eaia::group {

bool Scalar::is_zero() const {
  return std::all_of(be_.begin(), be_.end(), [](std::uint8_t b) { return b == 0; });
}

void Scalar::wipe() { secure_wipe(be_); }

bool GroupPoint::is_identity() const {
  return !enc_.empty() &&
         std::all_of(enc_.begin(), enc_.end(), [](std::uint8_t b) { return b == 0; });
}

GroupPoint Group::identity() const { return make_point(Bytes(point_bytes(), 0)); }

GroupPoint Group::point_sub(const GroupPoint& a, const GroupPoint& b) const {
  return point_add(a, point_neg(b));
}

Scalar Group::zero() const { return make_scalar(Bytes(scalar_bytes(), 0)); }

Scalar Group::from_u64(std::uint64_t v) const { return reduce(be64(v)); }

Scalar Group::decode_scalar(ByteView enc) const {
  if (enc.size() != scalar_bytes()) {
    fail(ErrorKind::MalformedScalar, "scalar width " + std::to_string(enc.size()));
  }
  const Bytes q = order();
  if (!std::lexicographical_compare(enc.begin(), enc.end(), q.begin(), q.end())) {
    fail(ErrorKind::MalformedScalar, "scalar not below group order");
  }
  return make_scalar(Bytes(enc.begin(), enc.end()));
}

Scalar Group::random_nonzero(RandomSource& rng) const {
  // 128 extra bits keep the modular bias negligible.
  Bytes wide(scalar_bytes() + 16);
  for (int attempt = 0; attempt < 64; ++attempt) {
    rng.fill(wide);
    Scalar k = reduce(wide);
    secure_wipe(wide);
    if (!k.is_zero()) return k;
  }
  fail(ErrorKind::DegenerateEphemeral, "random source produced only zero scalars");
}

std::shared_ptr<const Group> make_group(std::string_view name) {
  if (name == "p256" || name == "production") return make_p256();
  if (name == "toy17" || name == "toy") return make_toy_curve();
  throw std::invalid_argument("unknown group backend: " + std::string(name));
}

}  // namespace eaia::group
