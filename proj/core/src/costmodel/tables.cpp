#include "eaia/costmodel/tables.hpp"

#include <cmath>

#include "eaia/error.hpp"

namespace eaia::cost {

namespace {

using P = Primitive;

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

// Only operations that carry an energy figure are listed.
OpCounts energy_bearing(const OpCounts& ops, const PrimitiveCosts& costs) {
  OpCounts out;
  for (const auto& [p, n] : ops) {
    if (costs.energy(p) > 0) out[p] = n;
  }
  return out;
}

}  // namespace

std::vector<ReferenceScheme> reference_schemes() {
  std::vector<ReferenceScheme> out;

  ReferenceScheme hdma;
  hdma.formula.name = "HDMA";
  hdma.formula.counts = {{P::Hash, 4}, {P::ModExp, 5}, {P::Pairing, 2}, {P::Dec, 2}, {P::Enc, 2}};
  hdma.formula.energy_counts = OpCounts{{P::ModExp, 6}, {P::Pairing, 2}};
  hdma.formula.message_bits = 1696;
  hdma.published = {30.311, 67.84, 0.67, 148.6, 1.645, 150.245};
  hdma.printed_counts = OpCounts{{P::Hash, 4}, {P::ModExp, 5}, {P::Pairing, 2}, {P::Dec, 2}, {P::Enc, 1}};
  hdma.time_note =
      "printed formula 4T_hash+5T_me+2T_BP+2T_dec+T_enc gives 29.781 ms; the printed 30.311 ms needs 2T_enc";
  hdma.energy_note = "energy row lists 6T_me+2T_BP, the time row 5T_me";
  out.push_back(hdma);

  ReferenceScheme ppma;
  ppma.formula.name = "PPMA";
  ppma.formula.counts = {{P::Hash, 18}};
  ppma.formula.message_bits = 1504;
  ppma.published = {0.036, 60.16, 0.67, 0, 14.588, 14.588};
  ppma.energy_note =
      "1504 bits at 0.97 uJ/bit is 1.459 mJ; printed 14.588 mJ is ten times the per-bit rule";
  out.push_back(ppma);

  ReferenceScheme ppdas;
  ppdas.formula.name = "PPDAS";
  ppdas.formula.counts = {{P::Hash, 3}, {P::ScalarMul, 2}, {P::Pairing, 1}, {P::Dec, 1}, {P::Enc, 1}};
  ppdas.formula.message_bits = 2272;
  ppdas.published = {15.687, 90.88, 0.67, 64.6, 2.204, 66.804};
  out.push_back(ppdas);

  ReferenceScheme sppc;
  sppc.formula.name = "SPPC";
  sppc.formula.counts = {{P::ModExp, 2}, {P::Hash, 8}, {P::ScalarMul, 2}, {P::Dec, 3},
                         {P::Enc, 3},    {P::Sig, 1},  {P::Ver, 1}};
  sppc.formula.message_bits = 3216;
  sppc.published = {38.541, 128.64, 0.67, 55.5, 3.120, 58.620};
  sppc.time_note = "printed T_mc read as T_me";
  out.push_back(sppc);

  ReferenceScheme eaia;
  eaia.formula.name = "EAIA";
  eaia.formula.counts = {{P::Hash, 5}, {P::ScalarMul, 4}, {P::PointAdd, 2}};
  eaia.formula.message_bits = 1312;
  eaia.published = {2.354, 52.48, 0.67, 35.2, 1.273, 36.473};
  out.push_back(eaia);

  return out;
}

const ReferenceScheme& reference_scheme(const std::string& name) {
  static const std::vector<ReferenceScheme> all = reference_schemes();
  for (const auto& s : all) {
    if (s.formula.name == name) return s;
  }
  fail(ErrorKind::InvalidArgument, "unknown scheme " + name);
}

Table computation_table(const PrimitiveCosts& costs, const std::vector<ReferenceScheme>& schemes) {
  Table t({"scheme", "formula", "time_ms", "published_time_ms", "matches_paper", "discrepancy_note"});
  for (const auto& s : schemes) {
    const double ms = round_to(scheme_time_us(s.formula, costs) / 1000.0, 3);
    const bool match = same(ms, s.published.time_ms);
    std::string note = s.time_note;
    if (!match && note.empty()) note = "differs from printed value";
    t.add_row({s.formula.name, format_counts(s.formula.counts), ms, s.published.time_ms, match, note});
  }
  return t;
}

Table communication_table(const LinkModel& link, const std::vector<ReferenceScheme>& schemes) {
  Table t({"scheme", "message_bits", "tt_us", "tp_us", "total_us", "published_tt_us", "published_tp_us",
           "matches_paper", "discrepancy_note"});
  for (const auto& s : schemes) {
    const auto d = comm_delay(s.formula.message_bits, link.rate_bps, link.distance_m);
    const double tt = round_to(d.transmission_us, 2);
    const double tp = round_to(d.propagation_us, 3);
    const bool match = same(tt, s.published.tt_us) && same(round_to(tp, 2), s.published.tp_us);
    t.add_row({s.formula.name, s.formula.message_bits, tt, tp, round_to(d.total_us(), 3),
               s.published.tt_us, s.published.tp_us, match, match ? "" : "differs from printed value"});
  }
  return t;
}

Table energy_table(const PrimitiveCosts& costs, const std::vector<ReferenceScheme>& schemes) {
  Table t({"scheme", "compute_formula", "compute_mj", "transmit_mj", "total_mj", "published_compute_mj",
           "published_transmit_mj", "published_total_mj", "matches_paper", "discrepancy_note"});
  for (const auto& s : schemes) {
    const auto e = scheme_energy(s.formula, costs);
    const double compute = round_to(e.compute_mj, 3);
    const double transmit = round_to(e.transmit_mj, 3);
    const double total = round_to(e.total_mj(), 3);
    const bool match = same(compute, s.published.compute_mj) &&
                       same(transmit, s.published.transmit_mj) && same(total, s.published.total_mj);
    std::string note = s.energy_note;
    if (!match && note.empty()) note = "differs from printed value";
    t.add_row({s.formula.name, format_counts(energy_bearing(s.formula.energy_ops(), costs)), compute, transmit, total,
               s.published.compute_mj, s.published.transmit_mj, s.published.total_mj, match, note});
  }
  return t;
}

Table table_by_id(const std::string& id, const PrimitiveCosts& costs, const LinkModel& link) {
  if (id == "IV") return computation_table(costs);
  if (id == "V") return communication_table(link);
  if (id == "VII") return energy_table(costs);
  fail(ErrorKind::InvalidArgument, "unknown table '" + id + "' (expected IV, V or VII)");
}

}  // namespace eaia::cost
