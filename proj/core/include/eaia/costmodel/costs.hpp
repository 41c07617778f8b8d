#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace eaia::cost {

enum class Primitive { Hash, ScalarMul, PointAdd, ModExp, Enc, Dec, Sig, Ver, Pairing };

inline constexpr std::array<Primitive, 9> kAllPrimitives{
    Primitive::Hash, Primitive::ScalarMul, Primitive::PointAdd, Primitive::ModExp, Primitive::Enc,
    Primitive::Dec,  Primitive::Sig,       Primitive::Ver,      Primitive::Pairing};

// Machine name ("scalar_mul") and table notation ("T_sm").
std::string_view to_string(Primitive p);
std::string_view notation(Primitive p);
std::optional<Primitive> primitive_from_string(std::string_view name);

inline constexpr double kLightSpeedMps = 3e8;
inline constexpr double kDefaultRateBps = 25e6;  // OBU to OBU uplink
inline constexpr double kDefaultDistanceM = 200.0;

// Per-primitive time (us) and energy (mJ), plus per-bit radio energy (uJ).
// Primitives without a published energy figure cost 0 mJ.
struct PrimitiveCosts {
  std::map<Primitive, double> time_us;
  std::map<Primitive, double> energy_mj;
  double transmit_uj_per_bit = 0.66;
  double receive_uj_per_bit = 0.31;
  bool measured = false;

  static PrimitiveCosts defaults();

  double time(Primitive p) const;
  double energy(Primitive p) const;

  // Throws InvalidArgument on negative entries.
  void validate() const;
};

using OpCounts = std::map<Primitive, unsigned>;

struct SchemeFormula {
  std::string name;
  OpCounts counts;
  // Set when the energy comparison lists a different operation mix than the
  // timing comparison.
  std::optional<OpCounts> energy_counts;
  std::uint64_t message_bits = 0;

  const OpCounts& energy_ops() const { return energy_counts ? *energy_counts : counts; }
};

// "5T_hash+4T_sm+2T_pa"; "0" for an empty formula.
std::string format_counts(const OpCounts& counts);

double scheme_time_us(const SchemeFormula& f, const PrimitiveCosts& c);

struct CommDelay {
  double transmission_us = 0;
  double propagation_us = 0;
  double total_us() const { return transmission_us + propagation_us; }
};

// Tt = bits / rate, Tp = distance / c. Throws InvalidArgument if rate <= 0.
CommDelay comm_delay(std::uint64_t bits, double rate_bps, double distance_m);

struct EnergyCost {
  double compute_mj = 0;
  double transmit_mj = 0;
  double total_mj() const { return compute_mj + transmit_mj; }
};

// Radio energy charges every message bit once for sending and once for
// receiving.
EnergyCost scheme_energy(const SchemeFormula& f, const PrimitiveCosts& c);

nlohmann::json costs_to_json(const PrimitiveCosts& c);
PrimitiveCosts costs_from_json(const nlohmann::json& j);

// primitive,notation,time_us,energy_mj (RFC 4180)
std::string costs_to_csv(const PrimitiveCosts& c);

// Reads the versioned cost-table file; throws InvalidArgument on schema
// errors.
PrimitiveCosts load_cost_file(const std::string& path);

// Path of the cost table shipped with the sources.
std::string default_cost_file();

}  // namespace eaia::cost
