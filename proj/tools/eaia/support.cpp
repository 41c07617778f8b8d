#include "support.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "eaia/costmodel/table.hpp"
#include "eaia/protocol/protocol.hpp"

namespace eaia::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DegenerateProbability:
      return kExitUsage;
    case ErrorKind::StateCorrupt:
    case ErrorKind::DuplicateRegistration:
    case ErrorKind::ScenarioInvalid:
      return kExitState;
    default:
      return kExitProtocol;
  }
}

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw UsageError("unknown format '" + s + "' (text, json, csv)");
}

std::string canonical_backend(const std::string& s) {
  if (s == "production" || s == "p256") return "production";
  if (s == "toy" || s == "toy17") return "toy";
  throw UsageError("unknown backend '" + s + "' (production, toy)");
}

void apply_config_file(const fs::path& path, CliConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "backend") {
        cfg.backend = canonical_backend(value.get<std::string>());
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "window_ms") {
        cfg.window_ms = value.get<std::uint64_t>();
      } else if (key == "format") {
        cfg.format = parse_format(value.get<std::string>());
      } else if (key == "state_dir") {
        cfg.state_dir = value.get<std::string>();
      } else if (key == "out") {
        cfg.out = value.get<std::string>();
      } else {
        throw UsageError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: wrong value type (") + e.what() + ")");
  }
}

fs::path require_state_dir(const CliConfig& cfg) {
  if (cfg.state_dir) return *cfg.state_dir;
  if (const char* env = std::getenv("EAIA_STATE_DIR"); env != nullptr && *env != '\0') return env;
  throw UsageError("no state directory: pass --state-dir or set EAIA_STATE_DIR");
}

std::unique_ptr<RandomSource> make_rng(const CliConfig& cfg, std::uint64_t label) {
  if (cfg.seed) return std::make_unique<SeededRandom>(derive_seed(*cfg.seed, label));
  return std::make_unique<SystemRandom>();
}

protocol::Timestamp cli_now(const CliConfig& cfg) {
  if (cfg.seed) return protocol::Timestamp{0};
  const auto since = std::chrono::system_clock::now().time_since_epoch();
  return protocol::Timestamp{
      static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(since).count())};
}

std::uint64_t label_of(std::string_view text) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_file_atomic(const fs::path& path, const std::string& content, bool owner_only) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::StateCorrupt, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) fail(ErrorKind::StateCorrupt, "short write to " + tmp.string());
  }
  if (owner_only) {
    fs::permissions(tmp, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  }
  fs::rename(tmp, path);
}

void emit(const CliConfig& cfg, const std::string& text) {
  if (cfg.out) {
    write_file_atomic(*cfg.out, text);
  } else {
    std::cout << text << std::flush;
  }
}

std::string render_record(const nlohmann::ordered_json& record, Format format) {
  switch (format) {
    case Format::Json:
      return record.dump(2) + "\n";
    case Format::Csv: {
      cost::Table t({"key", "value"});
      for (const auto& [k, v] : record.items()) {
        t.add_row({k, v.is_string() ? v.get<std::string>() : v.dump()});
      }
      return t.to_csv();
    }
    case Format::Text: {
      std::string out;
      for (const auto& [k, v] : record.items()) {
        out += k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
      }
      return out;
    }
  }
  return {};
}

fs::path vehicle_dir(const fs::path& state_dir) { return state_dir / "vehicles"; }

void save_vehicle(const fs::path& state_dir, const StoredVehicle& v) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["name"] = v.name;
  j["vin"] = v.vin;
  j["seq"] = v.seq;
  j["rid"] = v.rid.hex();
  j["registered_id"] = v.registered_id.hex();
  j["id"] = v.keys.id.hex();
  j["x"] = to_hex(v.keys.x.bytes());
  j["y"] = to_hex(v.keys.y.bytes());
  j["R"] = to_hex(v.keys.R.bytes());
  j["X"] = to_hex(v.keys.X.bytes());
  j["Y"] = to_hex(v.keys.Y.bytes());
  write_file_atomic(vehicle_dir(state_dir) / (v.name + ".json"), j.dump(2) + "\n", true);
}

StoredVehicle load_vehicle(const fs::path& state_dir, const std::string& name,
                           const group::SystemParams& params) {
  const fs::path path = vehicle_dir(state_dir) / (name + ".json");
  std::ifstream in(path);
  if (!in) fail(ErrorKind::StateCorrupt, "no vehicle '" + name + "' in " + state_dir.string());
  const group::Group& g = params.g();
  try {
    const auto j = nlohmann::json::parse(in);
    StoredVehicle v;
    v.name = j.at("name").get<std::string>();
    v.vin = j.at("vin").get<std::string>();
    v.seq = j.at("seq").get<std::uint64_t>();
    v.rid = protocol::RealId::from_hex(j.at("rid").get<std::string>());
    v.registered_id = protocol::Pseudonym::from_hex(j.at("registered_id").get<std::string>());
    const auto x = g.decode_scalar(from_hex(j.at("x").get<std::string>()));
    protocol::RegistrationReply reply{g.decode_scalar(from_hex(j.at("y").get<std::string>())),
                                      g.decode_point(from_hex(j.at("R").get<std::string>())),
                                      g.decode_point(from_hex(j.at("Y").get<std::string>())),
                                      v.registered_id};
    v.keys = protocol::verify_registration(params, reply, x);
    v.keys.id = protocol::Pseudonym::from_hex(j.at("id").get<std::string>());
    if (to_hex(v.keys.X.bytes()) != j.at("X").get<std::string>()) {
      fail(ErrorKind::StateCorrupt, "X does not match x");
    }
    return v;
  } catch (const Error& e) {
    fail(ErrorKind::StateCorrupt, path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorKind::StateCorrupt, path.string() + ": " + e.what());
  }
}

std::vector<std::string> list_vehicles(const fs::path& state_dir) {
  std::vector<std::pair<std::uint64_t, std::string>> found;
  const fs::path dir = vehicle_dir(state_dir);
  if (!fs::exists(dir)) return {};
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    try {
      const auto j = nlohmann::json::parse(in);
      found.emplace_back(j.at("seq").get<std::uint64_t>(), j.at("name").get<std::string>());
    } catch (const std::exception& e) {
      fail(ErrorKind::StateCorrupt, entry.path().string() + ": " + e.what());
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> names;
  for (auto& [_, n] : found) names.push_back(std::move(n));
  return names;
}

}  // namespace eaia::cli
