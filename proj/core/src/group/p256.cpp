#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>
#include <stdexcept>
#include <string>

#include "eaia/error.hpp"
#include "eaia/group/group.hpp"

namespace eaia::group {

namespace {

struct BnCtxFree {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct BnFree {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct GroupFree {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};

using CtxPtr = std::unique_ptr<BN_CTX, BnCtxFree>;
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using PointPtr = std::unique_ptr<EC_POINT, PointFree>;
using GroupPtr = std::unique_ptr<EC_GROUP, GroupFree>;

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(std::string("openssl failure: ") + what);
}

CtxPtr new_ctx() {
  CtxPtr ctx(BN_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

BnPtr new_bn() {
  BnPtr bn(BN_new());
  if (!bn) throw std::bad_alloc();
  return bn;
}

BnPtr bn_from(ByteView be) {
  BnPtr bn(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr));
  if (!bn) throw std::bad_alloc();
  return bn;
}

class P256 final : public Group {
 public:
  P256() : group_(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)) {
    if (!group_) throw std::runtime_error("P-256 unavailable in this OpenSSL build");
    order_ = new_bn();
    check(EC_GROUP_get_order(group_.get(), order_.get(), nullptr), "get_order");
    field_bytes_ = static_cast<std::size_t>((EC_GROUP_get_degree(group_.get()) + 7) / 8);
    scalar_bytes_ = static_cast<std::size_t>(BN_num_bytes(order_.get()));
    generator_ = encode(EC_GROUP_get0_generator(group_.get()));
  }

  std::string_view name() const override { return "p256"; }
  std::size_t scalar_bytes() const override { return scalar_bytes_; }
  std::size_t point_bytes() const override { return 1 + 2 * field_bytes_; }
  const GroupPoint& generator() const override { return generator_; }
  Bytes order() const override { return to_bytes(order_.get()); }

  Scalar reduce(ByteView wide) const override {
    auto ctx = new_ctx();
    BnPtr v = bn_from(wide);
    BnPtr r = new_bn();
    check(BN_nnmod(r.get(), v.get(), order_.get(), ctx.get()), "nnmod");
    return make_scalar(to_bytes(r.get()));
  }

  Scalar scalar_add(const Scalar& a, const Scalar& b) const override {
    return binary(a, b, [&](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, BN_CTX* ctx) {
      return BN_mod_add(r, x, y, order_.get(), ctx);
    });
  }

  Scalar scalar_sub(const Scalar& a, const Scalar& b) const override {
    return binary(a, b, [&](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, BN_CTX* ctx) {
      return BN_mod_sub(r, x, y, order_.get(), ctx);
    });
  }

  Scalar scalar_mul(const Scalar& a, const Scalar& b) const override {
    return binary(a, b, [&](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, BN_CTX* ctx) {
      return BN_mod_mul(r, x, y, order_.get(), ctx);
    });
  }

  Scalar scalar_inv(const Scalar& k) const override {
    if (k.is_zero()) fail(ErrorKind::ZeroScalar, "inverse of zero");
    auto ctx = new_ctx();
    BnPtr v = bn_from(k.bytes());
    BnPtr r = new_bn();
    if (BN_mod_inverse(r.get(), v.get(), order_.get(), ctx.get()) == nullptr) {
      throw std::runtime_error("openssl failure: mod_inverse");
    }
    return make_scalar(to_bytes(r.get()));
  }

  GroupPoint point_mul(const Scalar& k, const GroupPoint& pt) const override {
    auto ctx = new_ctx();
    PointPtr in = to_ec(pt.bytes(), ctx.get());
    PointPtr out(EC_POINT_new(group_.get()));
    BnPtr n = bn_from(k.bytes());
    check(EC_POINT_mul(group_.get(), out.get(), nullptr, in.get(), n.get(), ctx.get()),
          "point_mul");
    return encode(out.get(), ctx.get());
  }

  GroupPoint point_add(const GroupPoint& a, const GroupPoint& b) const override {
    auto ctx = new_ctx();
    PointPtr pa = to_ec(a.bytes(), ctx.get());
    PointPtr pb = to_ec(b.bytes(), ctx.get());
    PointPtr out(EC_POINT_new(group_.get()));
    check(EC_POINT_add(group_.get(), out.get(), pa.get(), pb.get(), ctx.get()), "point_add");
    return encode(out.get(), ctx.get());
  }

  GroupPoint point_neg(const GroupPoint& pt) const override {
    auto ctx = new_ctx();
    PointPtr p = to_ec(pt.bytes(), ctx.get());
    check(EC_POINT_invert(group_.get(), p.get(), ctx.get()), "invert");
    return encode(p.get(), ctx.get());
  }

  GroupPoint decode_point(ByteView enc) const override {
    auto ctx = new_ctx();
    PointPtr p = to_ec(enc, ctx.get());
    return encode(p.get(), ctx.get());
  }

 private:
  Bytes to_bytes(const BIGNUM* v) const {
    Bytes out(scalar_bytes_);
    check(BN_bn2binpad(v, out.data(), static_cast<int>(out.size())) ==
                  static_cast<int>(out.size())
              ? 1
              : 0,
          "bn2binpad");
    return out;
  }

  template <typename Op>
  Scalar binary(const Scalar& a, const Scalar& b, Op op) const {
    auto ctx = new_ctx();
    BnPtr x = bn_from(a.bytes());
    BnPtr y = bn_from(b.bytes());
    BnPtr r = new_bn();
    check(op(r.get(), x.get(), y.get(), ctx.get()), "scalar op");
    return make_scalar(to_bytes(r.get()));
  }

  PointPtr to_ec(ByteView enc, BN_CTX* ctx) const {
    if (enc.size() != point_bytes()) {
      fail(ErrorKind::MalformedPoint, "point width " + std::to_string(enc.size()));
    }
    PointPtr p(EC_POINT_new(group_.get()));
    if (!p) throw std::bad_alloc();
    bool all_zero = true;
    for (std::uint8_t b : enc) all_zero = all_zero && b == 0;
    if (all_zero) {
      check(EC_POINT_set_to_infinity(group_.get(), p.get()), "set_to_infinity");
      return p;
    }
    if (enc[0] != 0x04) fail(ErrorKind::MalformedPoint, "unsupported point prefix");
    // oct2point rejects coordinates >= p and points off the curve; P-256 has
    // cofactor 1 so curve membership implies subgroup membership.
    if (EC_POINT_oct2point(group_.get(), p.get(), enc.data(), enc.size(), ctx) != 1) {
      fail(ErrorKind::MalformedPoint, "point not on curve");
    }
    return p;
  }

  GroupPoint encode(const EC_POINT* p, BN_CTX* ctx = nullptr) const {
    if (EC_POINT_is_at_infinity(group_.get(), p) == 1) {
      return make_point(Bytes(point_bytes(), 0));
    }
    Bytes out(point_bytes());
    const std::size_t n = EC_POINT_point2oct(group_.get(), p, POINT_CONVERSION_UNCOMPRESSED,
                                             out.data(), out.size(), ctx);
    if (n != out.size()) throw std::runtime_error("openssl failure: point2oct");
    return make_point(std::move(out));
  }

  GroupPtr group_;
  BnPtr order_;
  std::size_t field_bytes_ = 0;
  std::size_t scalar_bytes_ = 0;
  GroupPoint generator_;
};

}  // namespace

std::shared_ptr<const Group> make_p256() {
  static const auto instance = std::make_shared<const P256>();
  return instance;
}

}  // namespace eaia::group
