#pragma once

#include "eaia/netsim/report.hpp"
#include "eaia/netsim/scenario.hpp"

namespace eaia::netsim {

struct RunOptions {
  // Adds wall_time_ms to the report, which then stops being reproducible.
  bool timing = false;
};

// Executes the scenario and evaluates its expectations. Throws
// ScenarioInvalid if the scenario does not validate.
RunReport run_scenario(const Scenario& sc, const RunOptions& options = {});

}  // namespace eaia::netsim
