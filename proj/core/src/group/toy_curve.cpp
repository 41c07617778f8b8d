// Short-Weierstrass curve over a small prime field with plain integer
// arithmetic. Parameters must satisfy p, q < 2^32 so products fit in 64 bits.

#include <optional>
#include <string>

#include "eaia/error.hpp"
#include "eaia/group/group.hpp"

namespace eaia::group {

namespace {

struct SmallCurveParams {
  std::uint64_t p, a, b;
  std::uint64_t gx, gy;
  std::uint64_t q;
};

std::size_t byte_width(std::uint64_t v) {
  std::size_t n = 0;
  while (v != 0) {
    ++n;
    v >>= 8;
  }
  return n == 0 ? 1 : n;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

class SmallCurve final : public Group {
 public:
  explicit SmallCurve(SmallCurveParams prm, std::string name)
      : prm_(prm),
        name_(std::move(name)),
        field_bytes_(byte_width(prm.p - 1)),
        scalar_bytes_(byte_width(prm.q - 1)) {
    generator_ = encode(Affine{prm.gx, prm.gy});
  }

  std::string_view name() const override { return name_; }
  std::size_t scalar_bytes() const override { return scalar_bytes_; }
  std::size_t point_bytes() const override { return 1 + 2 * field_bytes_; }
  const GroupPoint& generator() const override { return generator_; }
  Bytes order() const override { return to_be(prm_.q, scalar_bytes_); }

  Scalar reduce(ByteView wide) const override {
    std::uint64_t r = 0;
    for (std::uint8_t byte : wide) r = (r * 256 + byte) % prm_.q;
    return make_scalar(to_be(r, scalar_bytes_));
  }

  Scalar scalar_add(const Scalar& a, const Scalar& b) const override {
    return make_scalar(to_be((val(a) + val(b)) % prm_.q, scalar_bytes_));
  }

  Scalar scalar_sub(const Scalar& a, const Scalar& b) const override {
    return make_scalar(to_be((val(a) + prm_.q - val(b)) % prm_.q, scalar_bytes_));
  }

  Scalar scalar_mul(const Scalar& a, const Scalar& b) const override {
    return make_scalar(to_be(val(a) * val(b) % prm_.q, scalar_bytes_));
  }

  Scalar scalar_inv(const Scalar& k) const override {
    const std::uint64_t v = val(k);
    if (v == 0) fail(ErrorKind::ZeroScalar, "inverse of zero");
    return make_scalar(to_be(pow_mod(v, prm_.q - 2, prm_.q), scalar_bytes_));
  }

  GroupPoint point_mul(const Scalar& k, const GroupPoint& pt) const override {
    const Affine base = decode_affine(pt.bytes());
    Affine acc;
    std::uint64_t n = val(k);
    Affine addend = base;
    while (n != 0) {
      if (n & 1) acc = add(acc, addend);
      addend = add(addend, addend);
      n >>= 1;
    }
    return encode(acc);
  }

  GroupPoint point_add(const GroupPoint& a, const GroupPoint& b) const override {
    return encode(add(decode_affine(a.bytes()), decode_affine(b.bytes())));
  }

  GroupPoint point_neg(const GroupPoint& pt) const override {
    Affine v = decode_affine(pt.bytes());
    if (v.xy) v.xy->second = (prm_.p - v.xy->second) % prm_.p;
    return encode(v);
  }

  GroupPoint decode_point(ByteView enc) const override {
    const Affine v = decode_affine(enc);
    // q * P must be the identity; cofactor-1 curves pass trivially but the
    // check keeps the backend honest for other parameter choices.
    if (v.xy) {
      Affine acc;
      Affine addend = v;
      for (std::uint64_t n = prm_.q; n != 0; n >>= 1) {
        if (n & 1) acc = add(acc, addend);
        addend = add(addend, addend);
      }
      if (acc.xy) fail(ErrorKind::MalformedPoint, "point outside the order-q subgroup");
    }
    return encode(v);
  }

 private:
  struct Affine {
    std::optional<std::pair<std::uint64_t, std::uint64_t>> xy;  // nullopt = identity
    Affine() = default;
    Affine(std::uint64_t x, std::uint64_t y) : xy(std::in_place, x, y) {}
  };

  static Bytes to_be(std::uint64_t v, std::size_t width) {
    Bytes out(width, 0);
    for (std::size_t i = width; i-- > 0;) {
      out[i] = static_cast<std::uint8_t>(v & 0xff);
      v >>= 8;
    }
    return out;
  }

  static std::uint64_t from_be(ByteView data) {
    std::uint64_t v = 0;
    for (std::uint8_t b : data) v = (v << 8) | b;
    return v;
  }

  std::uint64_t val(const Scalar& s) const { return from_be(s.bytes()); }

  bool on_curve(std::uint64_t x, std::uint64_t y) const {
    const std::uint64_t lhs = y * y % prm_.p;
    const std::uint64_t rhs = (x * x % prm_.p * x + prm_.a * x + prm_.b) % prm_.p;
    return lhs == rhs;
  }

  Affine decode_affine(ByteView enc) const {
    if (enc.size() != point_bytes()) {
      fail(ErrorKind::MalformedPoint, "point width " + std::to_string(enc.size()));
    }
    bool all_zero = true;
    for (std::uint8_t b : enc) all_zero = all_zero && b == 0;
    if (all_zero) return Affine{};
    if (enc[0] != 0x04) fail(ErrorKind::MalformedPoint, "unsupported point prefix");
    const std::uint64_t x = from_be(enc.subspan(1, field_bytes_));
    const std::uint64_t y = from_be(enc.subspan(1 + field_bytes_, field_bytes_));
    if (x >= prm_.p || y >= prm_.p) fail(ErrorKind::MalformedPoint, "coordinate out of field");
    if (!on_curve(x, y)) fail(ErrorKind::MalformedPoint, "point not on curve");
    return Affine{x, y};
  }

  GroupPoint encode(const Affine& v) const {
    if (!v.xy) return make_point(Bytes(point_bytes(), 0));
    Bytes out{0x04};
    append(out, to_be(v.xy->first, field_bytes_));
    append(out, to_be(v.xy->second, field_bytes_));
    return make_point(std::move(out));
  }

  std::uint64_t inv_field(std::uint64_t v) const { return pow_mod(v, prm_.p - 2, prm_.p); }

  Affine add(const Affine& lhs, const Affine& rhs) const {
    if (!lhs.xy) return rhs;
    if (!rhs.xy) return lhs;
    const auto [x1, y1] = *lhs.xy;
    const auto [x2, y2] = *rhs.xy;
    const std::uint64_t p = prm_.p;
    std::uint64_t slope = 0;
    if (x1 == x2) {
      if ((y1 + y2) % p == 0) return Affine{};
      slope = (3 * x1 % p * x1 + prm_.a) % p * inv_field(2 * y1 % p) % p;
    } else {
      slope = (y2 + p - y1) % p * inv_field((x2 + p - x1) % p) % p;
    }
    const std::uint64_t x3 = (slope * slope % p + 2 * p - x1 - x2) % p;
    const std::uint64_t y3 = (slope * ((x1 + p - x3) % p) % p + p - y1) % p;
    return Affine{x3, y3};
  }

  SmallCurveParams prm_;
  std::string name_;
  std::size_t field_bytes_;
  std::size_t scalar_bytes_;
  GroupPoint generator_;
};

}  // namespace

std::shared_ptr<const Group> make_toy_curve() {
  static const auto instance =
      std::make_shared<const SmallCurve>(SmallCurveParams{17, 2, 2, 5, 1, 19}, "toy17");
  return instance;
}

}  // namespace eaia::group
