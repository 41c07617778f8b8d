#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "eaia/bytes.hpp"
#include "eaia/random.hpp"

namespace eaia::group {

class Group;

// Element of Z_q, held as its canonical fixed-width big-endian encoding
// (ceil(|q|/8) bytes). Only a Group can mint one, so the value is always
// reduced.
class Scalar {
 public:
  Scalar() = default;

  const Bytes& bytes() const { return be_; }
  bool is_zero() const;
  bool empty() const { return be_.empty(); }

  // Zeroes the value in place; the scalar then reads as 0.
  void wipe();

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  friend class Group;
  explicit Scalar(Bytes be) : be_(std::move(be)) {}

  Bytes be_;
};

// Point of the prime-order subgroup, held as its canonical encoding:
// 0x04 || x || y with field-width big-endian coordinates, or all-zero bytes of
// the same width for the identity.
class GroupPoint {
 public:
  GroupPoint() = default;

  const Bytes& bytes() const { return enc_; }
  bool is_identity() const;
  bool empty() const { return enc_.empty(); }

  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;

 private:
  friend class Group;
  explicit GroupPoint(Bytes enc) : enc_(std::move(enc)) {}

  Bytes enc_;
};

// Prime-order elliptic-curve group behind a backend-neutral interface.
// Implementations are immutable after construction and safe to share across
// threads. Arithmetic is not constant time.
class Group {
 public:
  virtual ~Group() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t scalar_bytes() const = 0;
  virtual std::size_t point_bytes() const = 0;
  virtual const GroupPoint& generator() const = 0;
  // Group order q, big-endian, scalar_bytes() wide.
  virtual Bytes order() const = 0;

  // Reduces an arbitrary-width big-endian integer modulo q.
  virtual Scalar reduce(ByteView wide) const = 0;
  virtual Scalar scalar_add(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar scalar_sub(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar scalar_mul(const Scalar& a, const Scalar& b) const = 0;
  // Throws ZeroScalar for k = 0.
  virtual Scalar scalar_inv(const Scalar& k) const = 0;

  virtual GroupPoint point_mul(const Scalar& k, const GroupPoint& pt) const = 0;
  virtual GroupPoint point_add(const GroupPoint& a, const GroupPoint& b) const = 0;
  virtual GroupPoint point_neg(const GroupPoint& pt) const = 0;

  // Accepts the canonical encodings only; anything off the curve, outside
  // the order-q subgroup, or of the wrong width throws MalformedPoint.
  virtual GroupPoint decode_point(ByteView enc) const = 0;

  GroupPoint identity() const;
  GroupPoint point_sub(const GroupPoint& a, const GroupPoint& b) const;
  GroupPoint mul_generator(const Scalar& k) const { return point_mul(k, generator()); }

  Scalar zero() const;
  Scalar one() const { return from_u64(1); }
  Scalar from_u64(std::uint64_t v) const;
  // Exactly scalar_bytes() wide and < q, else MalformedScalar.
  Scalar decode_scalar(ByteView enc) const;
  // Uniform draw from [1, q-1]; DegenerateEphemeral if the source keeps
  // producing zero.
  Scalar random_nonzero(RandomSource& rng) const;

 protected:
  static Scalar make_scalar(Bytes be) { return Scalar(std::move(be)); }
  static GroupPoint make_point(Bytes enc) { return GroupPoint(std::move(enc)); }
};

// NIST P-256 via OpenSSL: 256-bit prime order, cofactor 1, 65-byte points.
std::shared_ptr<const Group> make_p256();

// y^2 = x^3 + 2x + 2 over F_17, generator (5,1), order 19. Small enough to
// enumerate every element, which makes it a brute-force oracle for protocol
// algebra.
std::shared_ptr<const Group> make_toy_curve();

// "p256" / "production" or "toy17" / "toy"; throws std::invalid_argument.
std::shared_ptr<const Group> make_group(std::string_view name);

}  // namespace eaia::group
