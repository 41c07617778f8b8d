#include "eaia/authority/authority.hpp"

#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "eaia/error.hpp"
#include "eaia/group/hash.hpp"

namespace eaia::authority {

using group::GroupPoint;
using group::Scalar;
using json = nlohmann::json;
using protocol::Pseudonym;
using protocol::RealId;
using protocol::Timestamp;

namespace fs = std::filesystem;

namespace {

constexpr int kLogVersion = 1;
constexpr int kMaxMaskDraws = 64;

Pseudonym mask_identity(const group::SystemParams& params, const Scalar& s, const RealId& rid,
                        const GroupPoint& mask_R) {
  const Bytes mask = protocol::pseudonym_mask(params, concat(s.bytes(), mask_R.bytes()));
  return Pseudonym::from_bytes(xor_bytes(rid.view(), mask));
}

Scalar registration_hash(const group::Group& g, const Pseudonym& id, const GroupPoint& X,
                         const GroupPoint& R) {
  return group::h1_scalar(g, concat(id.view(), X.bytes(), R.bytes()));
}

[[noreturn]] void corrupt(const std::string& what) { fail(ErrorKind::StateCorrupt, what); }

Bytes hex_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    corrupt(std::string("missing field ") + key);
  }
  try {
    return from_hex(j.at(key).get<std::string>());
  } catch (const std::invalid_argument&) {
    corrupt(std::string("bad hex in field ") + key);
  }
}

}  // namespace

Authority Authority::setup(std::shared_ptr<const group::Group> group, const SetupOptions& options,
                           RandomSource& rng) {
  Authority amf;
  amf.master_.s = group->random_nonzero(rng);
  amf.params_.p_pub = group->mul_generator(amf.master_.s);
  amf.params_.group = std::move(group);
  amf.params_.session_key_bits = options.session_key_bits;
  amf.params_.tag_bits = options.tag_bits;
  amf.params_.mask_bits = options.mask_bits;
  amf.params_.validate();
  amf.events_.push_back(amf.setup_event());
  return amf;
}

std::string Authority::setup_event() const {
  json e;
  e["event"] = "setup";
  e["version"] = kLogVersion;
  e["backend"] = std::string(params_.g().name());
  e["p_pub"] = to_hex(params_.p_pub.bytes());
  e["session_key_bits"] = params_.session_key_bits;
  e["tag_bits"] = params_.tag_bits;
  e["mask_bits"] = params_.mask_bits;
  return e.dump();
}

void Authority::attach(const fs::path& dir) {
  std::unique_lock lock(*mutex_);
  fs::create_directories(dir);
  {
    const fs::path key_path = dir / kMasterKeyFile;
    std::ofstream key(key_path, std::ios::trunc);
    if (!key) fail(ErrorKind::StateCorrupt, "cannot write " + key_path.string());
    key << to_hex(master_.s.bytes()) << '\n';
    key.close();
    fs::permissions(key_path, fs::perms::owner_read | fs::perms::owner_write,
                    fs::perm_options::replace);
  }
  std::ofstream log(dir / kLogFile, std::ios::trunc);
  if (!log) fail(ErrorKind::StateCorrupt, "cannot write " + (dir / kLogFile).string());
  for (const auto& line : events_) log << line << '\n';
  log.close();
  // register events carry r and y
  fs::permissions(dir / kLogFile, fs::perms::owner_read | fs::perms::owner_write,
                  fs::perm_options::replace);
  state_dir_ = dir;
}

void Authority::record_event(std::string line) {
  if (state_dir_) {
    std::ofstream log(*state_dir_ / kLogFile, std::ios::app);
    if (!log) fail(ErrorKind::StateCorrupt, "cannot append to authority log");
    log << line << '\n';
  }
  events_.push_back(std::move(line));
}

void Authority::apply_register(VehicleRecord record) {
  const std::size_t index = records_.size();
  by_rid_[record.rid] = index;
  by_pseudonym_[record.current_id] = index;
  by_public_key_[record.Y.bytes()] = index;
  records_.push_back(std::move(record));
}

protocol::RegistrationReply Authority::register_vehicle(const RealId& rid, ByteView X_enc,
                                                        Timestamp now, RandomSource& rng) {
  const group::Group& g = params_.g();
  const GroupPoint X = g.decode_point(X_enc);
  if (X.is_identity()) fail(ErrorKind::MalformedPoint, "X is the identity");

  std::unique_lock lock(*mutex_);
  if (by_rid_.contains(rid)) fail(ErrorKind::DuplicateRegistration, "RID already registered");

  VehicleRecord rec;
  rec.rid = rid;
  rec.X = X;
  rec.r = g.random_nonzero(rng);
  rec.R = g.mul_generator(rec.r);
  rec.registered_id = mask_identity(params_, master_.s, rid, rec.R);
  const Scalar h = registration_hash(g, rec.registered_id, X, rec.R);
  rec.y = g.scalar_add(rec.r, g.scalar_mul(master_.s, h));
  rec.Y = g.point_add(rec.R, g.point_mul(h, params_.p_pub));
  rec.current_id = rec.registered_id;
  rec.mask_r = rec.r;
  rec.mask_R = rec.R;
  rec.issued_at = now;

  json e;
  e["event"] = "register";
  e["rid"] = rid.hex();
  e["X"] = to_hex(X.bytes());
  e["r"] = to_hex(rec.r.bytes());
  e["R"] = to_hex(rec.R.bytes());
  e["y"] = to_hex(rec.y.bytes());
  e["Y"] = to_hex(rec.Y.bytes());
  e["id"] = rec.current_id.hex();
  e["issued_at"] = now.ms;
  record_event(e.dump());

  protocol::RegistrationReply reply{rec.y, rec.R, rec.Y, rec.current_id};
  apply_register(std::move(rec));
  return reply;
}

const VehicleRecord* Authority::by_id(const Pseudonym& id) const {
  const auto it = by_pseudonym_.find(id);
  return it == by_pseudonym_.end() ? nullptr : &records_[it->second];
}

protocol::PseudonymUpdateReply Authority::process_pseudonym_update(
    const protocol::PseudonymUpdateRequest& req, Timestamp now, std::uint64_t window_ms,
    RandomSource& rng) {
  const group::Group& g = params_.g();
  std::unique_lock lock(*mutex_);
  const VehicleRecord* found = by_id(req.id);
  if (found == nullptr) fail(ErrorKind::UnknownPseudonym, "update for unknown pseudonym");
  if (!protocol::is_fresh(req.t, now, window_ms)) {
    fail(ErrorKind::StaleTimestamp, "update request outside freshness window");
  }

  GroupPoint A, B;
  Scalar sigma;
  try {
    A = g.decode_point(req.A);
    B = g.decode_point(req.B);
    sigma = g.decode_scalar(req.sigma);
  } catch (const Error& e) {
    fail(ErrorKind::SignatureInvalid, std::string("malformed update signature: ") + e.what());
  }
  if (sigma.is_zero() || !protocol::verify_signature(g, sigma, B, req.id, A, req.t, found->Y)) {
    fail(ErrorKind::SignatureInvalid, "update signature does not verify");
  }
  if (req.R != found->R.bytes()) fail(ErrorKind::RidMismatch, "R does not match registration");
  if (recover_rid(*found) != found->rid) fail(ErrorKind::RidMismatch, "recovered RID differs");

  const std::size_t index = by_pseudonym_.at(req.id);
  VehicleRecord& rec = records_[index];
  const Pseudonym old_id = rec.current_id;
  Scalar mask_r;
  GroupPoint mask_R;
  Pseudonym next = old_id;
  for (int draw = 0; next == old_id; ++draw) {
    if (draw == kMaxMaskDraws) fail(ErrorKind::DegenerateEphemeral, "no fresh pseudonym drawn");
    mask_r = g.random_nonzero(rng);
    mask_R = g.mul_generator(mask_r);
    next = mask_identity(params_, master_.s, rec.rid, mask_R);
  }
  rec.mask_r = mask_r;
  rec.mask_R = mask_R;
  rec.current_id = next;
  rec.issued_at = now;
  by_pseudonym_.erase(old_id);
  by_pseudonym_[rec.current_id] = index;

  json e;
  e["event"] = "update";
  e["old_id"] = old_id.hex();
  e["mask_r"] = to_hex(rec.mask_r.bytes());
  e["mask_R"] = to_hex(rec.mask_R.bytes());
  e["id"] = rec.current_id.hex();
  e["issued_at"] = now.ms;
  record_event(e.dump());

  protocol::PseudonymUpdateReply reply;
  reply.Q = xor_bytes(protocol::pseudonym_mask(params_, rec.y.bytes()), rec.current_id.view());
  reply.t_c = now;
  return reply;
}

protocol::PublicKeyPair Authority::registry_lookup(const Pseudonym& id) const {
  auto keys = find(id);
  if (!keys) fail(ErrorKind::UnknownPseudonym, "pseudonym " + id.hex().substr(0, 16) + "...");
  return *keys;
}

std::optional<protocol::PublicKeyPair> Authority::find(const Pseudonym& id) const {
  std::shared_lock lock(*mutex_);
  const VehicleRecord* rec = by_id(id);
  if (rec == nullptr) return std::nullopt;
  return protocol::PublicKeyPair{rec->X, rec->Y};
}

bool Authority::has_public_key(const GroupPoint& Y) const {
  std::shared_lock lock(*mutex_);
  return by_public_key_.contains(Y.bytes());
}

RealId Authority::recover_rid(const VehicleRecord& record) const {
  const Bytes mask =
      protocol::pseudonym_mask(params_, concat(master_.s.bytes(), record.mask_R.bytes()));
  return RealId::from_bytes(xor_bytes(record.current_id.view(), mask));
}

std::vector<std::string> Authority::audit() const {
  std::shared_lock lock(*mutex_);
  const group::Group& g = params_.g();
  std::vector<std::string> problems;
  if (g.mul_generator(master_.s) != params_.p_pub) problems.push_back("P_pub != s*P");
  for (const auto& rec : records_) {
    const std::string who = "record " + rec.rid.hex().substr(0, 12);
    const Scalar h = registration_hash(g, rec.registered_id, rec.X, rec.R);
    const GroupPoint expected = g.point_add(rec.R, g.point_mul(h, params_.p_pub));
    if (g.mul_generator(rec.y) != expected) problems.push_back(who + ": y*P != R + H*P_pub");
    if (rec.Y != expected) problems.push_back(who + ": Y != R + H*P_pub");
    if (g.mul_generator(rec.r) != rec.R) problems.push_back(who + ": R != r*P");
    if (g.mul_generator(rec.mask_r) != rec.mask_R) problems.push_back(who + ": mask_R != r'*P");
    if (recover_rid(rec) != rec.rid) problems.push_back(who + ": recovered RID differs");
    const auto it = by_pseudonym_.find(rec.current_id);
    if (it == by_pseudonym_.end() || &records_[it->second] != &rec) {
      problems.push_back(who + ": registry entry missing");
    }
  }
  if (by_pseudonym_.size() != records_.size()) {
    problems.push_back("registry holds " + std::to_string(by_pseudonym_.size()) +
                       " entries for " + std::to_string(records_.size()) + " vehicles");
  }
  return problems;
}

std::vector<VehicleRecord> Authority::records() const {
  std::shared_lock lock(*mutex_);
  return records_;
}

std::optional<VehicleRecord> Authority::record_for(const RealId& rid) const {
  std::shared_lock lock(*mutex_);
  const auto it = by_rid_.find(rid);
  if (it == by_rid_.end()) return std::nullopt;
  return records_[it->second];
}

std::size_t Authority::vehicle_count() const {
  std::shared_lock lock(*mutex_);
  return records_.size();
}

std::string Authority::registry_json() const {
  std::shared_lock lock(*mutex_);
  json out = json::object();
  for (const auto& [id, index] : by_pseudonym_) {
    out[id.hex()] = {{"X", to_hex(records_[index].X.bytes())},
                     {"Y", to_hex(records_[index].Y.bytes())}};
  }
  return out.dump(2);
}

Authority Authority::load(const fs::path& dir) {
  std::ifstream key_in(dir / kMasterKeyFile);
  if (!key_in) corrupt("missing " + (dir / kMasterKeyFile).string());
  std::string key_hex;
  key_in >> key_hex;

  std::ifstream log_in(dir / kLogFile);
  if (!log_in) corrupt("missing " + (dir / kLogFile).string());

  Authority amf;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(log_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json e;
    try {
      e = json::parse(line);
    } catch (const json::exception&) {
      corrupt("line " + std::to_string(line_no) + " is not JSON");
    }
    const std::string kind = e.value("event", "");
    if (line_no == 1) {
      if (kind != "setup" || e.value("version", 0) != kLogVersion) {
        corrupt("log must start with a version 1 setup event");
      }
      try {
        amf.params_.group = group::make_group(e.at("backend").get<std::string>());
        amf.params_.session_key_bits = e.at("session_key_bits").get<std::size_t>();
        amf.params_.tag_bits = e.at("tag_bits").get<std::size_t>();
        amf.params_.mask_bits = e.at("mask_bits").get<std::size_t>();
        amf.master_.s = amf.params_.g().decode_scalar(from_hex(key_hex));
        amf.params_.p_pub = amf.params_.g().decode_point(hex_field(e, "p_pub"));
        amf.params_.validate();
      } catch (const Error& err) {
        corrupt(std::string("setup event: ") + err.what());
      } catch (const std::exception& err) {
        corrupt(std::string("setup event: ") + err.what());
      }
      if (amf.params_.g().mul_generator(amf.master_.s) != amf.params_.p_pub) {
        corrupt("master key does not match P_pub");
      }
      amf.events_.push_back(line);
      continue;
    }

    const group::Group& g = amf.params_.g();
    try {
      if (kind == "register") {
        VehicleRecord rec;
        rec.rid = RealId::from_bytes(hex_field(e, "rid"));
        rec.X = g.decode_point(hex_field(e, "X"));
        rec.r = g.decode_scalar(hex_field(e, "r"));
        rec.R = g.decode_point(hex_field(e, "R"));
        rec.y = g.decode_scalar(hex_field(e, "y"));
        rec.Y = g.decode_point(hex_field(e, "Y"));
        rec.registered_id = Pseudonym::from_bytes(hex_field(e, "id"));
        rec.current_id = rec.registered_id;
        rec.mask_r = rec.r;
        rec.mask_R = rec.R;
        rec.issued_at = Timestamp{e.at("issued_at").get<std::uint64_t>()};
        if (amf.by_rid_.contains(rec.rid)) corrupt("duplicate registration in log");
        if (g.mul_generator(rec.r) != rec.R) corrupt("R != r*P in log");
        if (mask_identity(amf.params_, amf.master_.s, rec.rid, rec.R) != rec.registered_id) {
          corrupt("pseudonym does not match RID and R");
        }
        const Scalar h = registration_hash(g, rec.registered_id, rec.X, rec.R);
        if (g.scalar_add(rec.r, g.scalar_mul(amf.master_.s, h)) != rec.y) {
          corrupt("y != r + s*H in log");
        }
        if (g.point_add(rec.R, g.point_mul(h, amf.params_.p_pub)) != rec.Y) {
          corrupt("Y != R + H*P_pub in log");
        }
        amf.apply_register(std::move(rec));
      } else if (kind == "update") {
        const Pseudonym old_id = Pseudonym::from_bytes(hex_field(e, "old_id"));
        const auto it = amf.by_pseudonym_.find(old_id);
        if (it == amf.by_pseudonym_.end()) corrupt("update for unknown pseudonym");
        const std::size_t index = it->second;
        VehicleRecord& rec = amf.records_[index];
        rec.mask_r = g.decode_scalar(hex_field(e, "mask_r"));
        rec.mask_R = g.decode_point(hex_field(e, "mask_R"));
        if (g.mul_generator(rec.mask_r) != rec.mask_R) corrupt("mask_R != r'*P in log");
        rec.current_id = Pseudonym::from_bytes(hex_field(e, "id"));
        if (mask_identity(amf.params_, amf.master_.s, rec.rid, rec.mask_R) != rec.current_id) {
          corrupt("updated pseudonym does not match RID");
        }
        rec.issued_at = Timestamp{e.at("issued_at").get<std::uint64_t>()};
        amf.by_pseudonym_.erase(it);
        amf.by_pseudonym_[rec.current_id] = index;
      } else {
        corrupt("unknown event '" + kind + "' on line " + std::to_string(line_no));
      }
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::StateCorrupt) throw;
      corrupt("line " + std::to_string(line_no) + ": " + err.what());
    } catch (const json::exception& err) {
      corrupt("line " + std::to_string(line_no) + ": " + err.what());
    } catch (const std::invalid_argument& err) {
      corrupt("line " + std::to_string(line_no) + ": " + err.what());
    }
    amf.events_.push_back(line);
  }
  if (amf.events_.empty()) corrupt("empty authority log");
  amf.state_dir_ = dir;
  return amf;
}

}  // namespace eaia::authority
