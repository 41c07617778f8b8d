#pragma once

#include <string>
#include <vector>

#include "eaia/authority/authority.hpp"
#include "eaia/error.hpp"
#include "eaia/protocol/protocol.hpp"
#include "eaia/random.hpp"

namespace testing_support {

struct World {
  eaia::authority::Authority amf;
  std::vector<eaia::protocol::RealId> rids;
  std::vector<eaia::protocol::StaticKeyMaterial> keys;

  const eaia::group::SystemParams& params() const { return amf.params(); }
  const eaia::group::Group& g() const { return amf.params().g(); }
};

inline World make_world(const std::string& backend, std::size_t vehicles, std::uint64_t seed) {
  eaia::SeededRandom rng(seed);
  World w{eaia::authority::Authority::setup(eaia::group::make_group(backend), {}, rng), {}, {}};
  for (std::size_t i = 0; i < vehicles; ++i) {
    const auto rid = eaia::protocol::real_id_from_vin("TESTVIN" + std::to_string(seed) + "-" +
                                                      std::to_string(i));
    const auto x = w.g().random_nonzero(rng);
    const auto reply = w.amf.register_vehicle(rid, w.g().mul_generator(x).bytes(), {0}, rng);
    w.rids.push_back(rid);
    w.keys.push_back(eaia::protocol::verify_registration(w.params(), reply, x));
  }
  return w;
}

template <typename F>
eaia::ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const eaia::Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected an eaia::Error");
}

}  // namespace testing_support
