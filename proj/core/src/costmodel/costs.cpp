#include "eaia/costmodel/costs.hpp"

#include <fstream>
#include <sstream>

#include "eaia/costmodel/table.hpp"
#include "eaia/error.hpp"

namespace eaia::cost {

namespace {

struct PrimitiveInfo {
  Primitive p;
  std::string_view name;
  std::string_view notation;
};

constexpr std::array<PrimitiveInfo, 9> kInfo{{
    {Primitive::Hash, "hash", "T_hash"},
    {Primitive::ScalarMul, "scalar_mul", "T_sm"},
    {Primitive::PointAdd, "point_add", "T_pa"},
    {Primitive::ModExp, "modexp", "T_me"},
    {Primitive::Enc, "enc", "T_enc"},
    {Primitive::Dec, "dec", "T_dec"},
    {Primitive::Sig, "sig", "T_sig"},
    {Primitive::Ver, "ver", "T_ver"},
    {Primitive::Pairing, "pairing", "T_BP"},
}};

constexpr int kCostFileVersion = 1;

}  // namespace

std::string_view to_string(Primitive p) {
  for (const auto& i : kInfo) {
    if (i.p == p) return i.name;
  }
  return "unknown";
}

std::string_view notation(Primitive p) {
  for (const auto& i : kInfo) {
    if (i.p == p) return i.notation;
  }
  return "T_?";
}

std::optional<Primitive> primitive_from_string(std::string_view name) {
  for (const auto& i : kInfo) {
    if (i.name == name) return i.p;
  }
  return std::nullopt;
}

PrimitiveCosts PrimitiveCosts::defaults() {
  PrimitiveCosts c;
  c.time_us = {
      {Primitive::Hash, 2},      {Primitive::ScalarMul, 576}, {Primitive::PointAdd, 20},
      {Primitive::ModExp, 249},  {Primitive::Enc, 530},       {Primitive::Dec, 7425},
      {Primitive::Sig, 12560},   {Primitive::Ver, 450},       {Primitive::Pairing, 6574},
  };
  c.energy_mj = {
      {Primitive::ModExp, 9.1}, {Primitive::Sig, 8.8},        {Primitive::Ver, 10.9},
      {Primitive::Pairing, 47.0}, {Primitive::ScalarMul, 8.8},
  };
  return c;
}

double PrimitiveCosts::time(Primitive p) const {
  const auto it = time_us.find(p);
  return it == time_us.end() ? 0.0 : it->second;
}

double PrimitiveCosts::energy(Primitive p) const {
  const auto it = energy_mj.find(p);
  return it == energy_mj.end() ? 0.0 : it->second;
}

void PrimitiveCosts::validate() const {
  for (const auto& [p, v] : time_us) {
    if (v < 0) fail(ErrorKind::InvalidArgument, "negative time for " + std::string(to_string(p)));
  }
  for (const auto& [p, v] : energy_mj) {
    if (v < 0) fail(ErrorKind::InvalidArgument, "negative energy for " + std::string(to_string(p)));
  }
  if (transmit_uj_per_bit < 0 || receive_uj_per_bit < 0) {
    fail(ErrorKind::InvalidArgument, "negative per-bit energy");
  }
}

std::string format_counts(const OpCounts& counts) {
  std::string out;
  for (Primitive p : kAllPrimitives) {
    const auto it = counts.find(p);
    if (it == counts.end() || it->second == 0) continue;
    if (!out.empty()) out += '+';
    if (it->second != 1) out += std::to_string(it->second);
    out += notation(p);
  }
  return out.empty() ? "0" : out;
}

double scheme_time_us(const SchemeFormula& f, const PrimitiveCosts& c) {
  double total = 0;
  for (const auto& [p, n] : f.counts) total += n * c.time(p);
  return total;
}

CommDelay comm_delay(std::uint64_t bits, double rate_bps, double distance_m) {
  if (rate_bps <= 0) fail(ErrorKind::InvalidArgument, "data rate must be positive");
  if (distance_m < 0) fail(ErrorKind::InvalidArgument, "distance must be non-negative");
  CommDelay d;
  d.transmission_us = static_cast<double>(bits) / rate_bps * 1e6;
  d.propagation_us = distance_m / kLightSpeedMps * 1e6;
  return d;
}

EnergyCost scheme_energy(const SchemeFormula& f, const PrimitiveCosts& c) {
  EnergyCost e;
  for (const auto& [p, n] : f.energy_ops()) e.compute_mj += n * c.energy(p);
  e.transmit_mj = static_cast<double>(f.message_bits) *
                  (c.transmit_uj_per_bit + c.receive_uj_per_bit) / 1000.0;
  return e;
}

nlohmann::json costs_to_json(const PrimitiveCosts& c) {
  nlohmann::json prims = nlohmann::json::object();
  for (Primitive p : kAllPrimitives) {
    prims[std::string(to_string(p))] = {{"notation", std::string(notation(p))},
                                        {"time_us", c.time(p)},
                                        {"energy_mj", c.energy(p)}};
  }
  return {{"version", kCostFileVersion},
          {"measured", c.measured},
          {"primitives", prims},
          {"transmit_uj_per_bit", c.transmit_uj_per_bit},
          {"receive_uj_per_bit", c.receive_uj_per_bit}};
}

PrimitiveCosts costs_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kCostFileVersion) {
      fail(ErrorKind::InvalidArgument, "unsupported cost table version");
    }
    PrimitiveCosts c;
    c.measured = j.value("measured", false);
    for (const auto& [name, entry] : j.at("primitives").items()) {
      const auto p = primitive_from_string(name);
      if (!p) fail(ErrorKind::InvalidArgument, "unknown primitive '" + name + "'");
      c.time_us[*p] = entry.at("time_us").get<double>();
      const double e = entry.value("energy_mj", 0.0);
      if (e != 0.0) c.energy_mj[*p] = e;
    }
    c.transmit_uj_per_bit = j.at("transmit_uj_per_bit").get<double>();
    c.receive_uj_per_bit = j.at("receive_uj_per_bit").get<double>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("cost table: ") + e.what());
  }
}

std::string costs_to_csv(const PrimitiveCosts& c) {
  Table t({"primitive", "notation", "time_us", "energy_mj"});
  for (Primitive p : kAllPrimitives) {
    t.add_row({std::string(to_string(p)), std::string(notation(p)), c.time(p), c.energy(p)});
  }
  return t.to_csv();
}

PrimitiveCosts load_cost_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open cost table " + path);
  try {
    return costs_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("cost table: ") + e.what());
  }
}

std::string default_cost_file() { return EAIA_DEFAULT_COST_TABLE; }

}  // namespace eaia::cost
