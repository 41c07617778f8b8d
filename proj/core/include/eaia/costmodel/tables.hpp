#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eaia/costmodel/costs.hpp"
#include "eaia/costmodel/table.hpp"

namespace eaia::cost {

// Field lengths (bits) used for the message-size figures.
struct BitLengths {
  unsigned group_element = 320;
  unsigned scalar = 160;
  unsigned id = 256;
  unsigned hash = 512;
  unsigned timestamp = 32;
};

// Values as printed in the published comparison tables.
struct PublishedValues {
  double time_ms = 0;
  double tt_us = 0;
  double tp_us = 0;
  double compute_mj = 0;
  double transmit_mj = 0;
  double total_mj = 0;
};

struct ReferenceScheme {
  SchemeFormula formula;
  PublishedValues published;
  // Operation mix as printed next to the time figure, when it differs from
  // the one that reproduces it.
  std::optional<OpCounts> printed_counts;
  std::string time_note;
  std::string energy_note;
};

// HDMA, PPMA, PPDAS, SPPC, EAIA in table order.
std::vector<ReferenceScheme> reference_schemes();
const ReferenceScheme& reference_scheme(const std::string& name);

struct LinkModel {
  double rate_bps = kDefaultRateBps;
  double distance_m = kDefaultDistanceM;
};

// Computation time per scheme (ms) against the printed figure.
Table computation_table(const PrimitiveCosts& costs,
                        const std::vector<ReferenceScheme>& schemes = reference_schemes());

// Message size with transmission and propagation delay (us).
Table communication_table(const LinkModel& link = {},
                          const std::vector<ReferenceScheme>& schemes = reference_schemes());

// Compute, radio and total energy (mJ).
Table energy_table(const PrimitiveCosts& costs,
                   const std::vector<ReferenceScheme>& schemes = reference_schemes());

// "IV", "V" or "VII"; throws InvalidArgument otherwise.
Table table_by_id(const std::string& id, const PrimitiveCosts& costs, const LinkModel& link = {});

}  // namespace eaia::cost
