#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eaia/error.hpp"
#include "eaia/group/params.hpp"
#include "eaia/protocol/types.hpp"
#include "eaia/random.hpp"

namespace eaia::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitState = 2,
  kExitProtocol = 3,
  kExitAssertion = 4,
};

// Raised for bad flags or values discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind);

enum class Format { Text, Json, Csv };

struct CliConfig {
  std::string backend = "production";
  std::optional<std::uint64_t> seed;
  std::uint64_t window_ms = 500;
  Format format = Format::Text;
  std::optional<std::filesystem::path> state_dir;
  std::optional<std::filesystem::path> out;
};

Format parse_format(const std::string& s);
std::string canonical_backend(const std::string& s);

// Reads a JSON config file. Keys: backend, seed, window_ms, format,
// state_dir, out. Anything else is a UsageError.
void apply_config_file(const std::filesystem::path& path, CliConfig& cfg);

std::filesystem::path require_state_dir(const CliConfig& cfg);

// Seeded when --seed is given, operating-system randomness otherwise.
std::unique_ptr<RandomSource> make_rng(const CliConfig& cfg, std::uint64_t label);

// Logical time 0 under --seed so runs repeat; wall-clock ms otherwise.
protocol::Timestamp cli_now(const CliConfig& cfg);

std::uint64_t label_of(std::string_view text);

// Writes via a temporary file and rename, so readers never see a partial
// file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content,
                       bool owner_only = false);

// Sends text to --out when set, stdout otherwise.
void emit(const CliConfig& cfg, const std::string& text);

// Flat key/value record in the selected format.
std::string render_record(const nlohmann::ordered_json& record, Format format);

// Vehicle-side key material as an on-board unit would keep it.
struct StoredVehicle {
  std::string name;
  std::string vin;
  std::uint64_t seq = 0;
  protocol::RealId rid;
  protocol::Pseudonym registered_id;
  protocol::StaticKeyMaterial keys;
};

std::filesystem::path vehicle_dir(const std::filesystem::path& state_dir);
void save_vehicle(const std::filesystem::path& state_dir, const StoredVehicle& v);
// Re-checks the registration equation; StateCorrupt on any mismatch.
StoredVehicle load_vehicle(const std::filesystem::path& state_dir, const std::string& name,
                           const group::SystemParams& params);
// Names in registration order.
std::vector<std::string> list_vehicles(const std::filesystem::path& state_dir);

}  // namespace eaia::cli
