#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "eaia/group/params.hpp"
#include "eaia/protocol/protocol.hpp"
#include "eaia/protocol/types.hpp"
#include "eaia/protocol/wire.hpp"
#include "eaia/random.hpp"

namespace eaia::authority {

inline constexpr const char* kLogFile = "authority.log";
inline constexpr const char* kMasterKeyFile = "master.key";

struct MasterKey {
  group::Scalar s;
};

struct SetupOptions {
  std::size_t session_key_bits = 256;
  std::size_t tag_bits = 256;
  std::size_t mask_bits = 256;
};

// Authority-side state for one vehicle.
//
// The registration triple (r, R, registered_id) fixes H and therefore y and Y
// for the life of the record. Pseudonym updates only replace the mask secret
// (mask_r, mask_R) and current_id, so current_id = rid xor h_mask(s || mask_R)
// always holds and the registration equation stays auditable.
struct VehicleRecord {
  protocol::RealId rid;
  group::Scalar r;
  group::GroupPoint R;
  group::Scalar y;
  group::GroupPoint X;
  group::GroupPoint Y;
  protocol::Pseudonym registered_id;
  protocol::Pseudonym current_id;
  group::Scalar mask_r;
  group::GroupPoint mask_R;
  protocol::Timestamp issued_at;
};

// The AMF. Single writer, concurrent readers: register and update take an
// exclusive lock, lookups a shared one.
class Authority final : public protocol::PeerDirectory {
 public:
  static Authority setup(std::shared_ptr<const group::Group> group, const SetupOptions& options,
                         RandomSource& rng);

  // Rebuilds state by replaying the event log in dir; the result stays
  // attached to dir. Throws StateCorrupt on any inconsistency.
  static Authority load(const std::filesystem::path& dir);

  Authority(Authority&&) noexcept = default;
  Authority& operator=(Authority&&) noexcept = default;

  // Writes master.key and the full event log to dir, then appends every
  // later event there.
  void attach(const std::filesystem::path& dir);

  const group::SystemParams& params() const { return params_; }
  const MasterKey& master_key() const { return master_; }

  // Issues (y, R, Y, id) for a new vehicle and publishes id -> (X, Y).
  protocol::RegistrationReply register_vehicle(const protocol::RealId& rid, ByteView X,
                                               protocol::Timestamp now, RandomSource& rng);

  protocol::PseudonymUpdateReply process_pseudonym_update(
      const protocol::PseudonymUpdateRequest& req, protocol::Timestamp now,
      std::uint64_t window_ms, RandomSource& rng);

  // Throws UnknownPseudonym when id is not a current pseudonym.
  protocol::PublicKeyPair registry_lookup(const protocol::Pseudonym& id) const;

  std::optional<protocol::PublicKeyPair> find(const protocol::Pseudonym& id) const override;
  bool has_public_key(const group::GroupPoint& Y) const override;

  // id xor h_mask(s || mask_R)
  protocol::RealId recover_rid(const VehicleRecord& record) const;

  // Re-checks every record; returns one line per violated invariant.
  std::vector<std::string> audit() const;

  std::vector<VehicleRecord> records() const;
  std::optional<VehicleRecord> record_for(const protocol::RealId& rid) const;
  std::size_t vehicle_count() const;

  // {"<pseudonym hex>": {"X": hex, "Y": hex}, ...}
  std::string registry_json() const;

  const std::vector<std::string>& event_log() const { return events_; }

 private:
  Authority() : mutex_(std::make_unique<std::shared_mutex>()) {}

  void record_event(std::string line);
  void apply_register(VehicleRecord record);
  const VehicleRecord* by_id(const protocol::Pseudonym& id) const;
  std::string setup_event() const;

  group::SystemParams params_;
  MasterKey master_;
  std::vector<VehicleRecord> records_;
  std::map<protocol::RealId, std::size_t> by_rid_;
  std::map<protocol::Pseudonym, std::size_t> by_pseudonym_;
  std::map<Bytes, std::size_t> by_public_key_;
  std::vector<std::string> events_;
  std::optional<std::filesystem::path> state_dir_;
  std::unique_ptr<std::shared_mutex> mutex_;
};

}  // namespace eaia::authority
