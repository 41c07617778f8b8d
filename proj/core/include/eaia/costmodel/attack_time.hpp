#pragma once

#include <cstdint>
#include <vector>

#include "eaia/costmodel/tables.hpp"

namespace eaia::cost {

// p: chance an attempt is disrupted; t_fail[i]: time lost when disrupted at
// step i + 1; t_success: time of a clean run.
struct AttackModel {
  double p = 0;
  std::vector<double> t_fail;
  double t_success = 0;

  std::size_t steps() const { return t_fail.size(); }

  // DegenerateProbability for p >= 1, InvalidArgument for other violations.
  void validate() const;

  // n steps with t_fail[i] = (i + 1) / n * t_success.
  static AttackModel uniform_steps(double p, double t_success, unsigned n);
};

// Expected time to the first successful run.
double avg_auth_time(const AttackModel& m);

struct MonteCarloEstimate {
  double mean = 0;
  double stderr_mean = 0;
  std::uint64_t trials = 0;
};

// Retries until success; each failure picks its step uniformly.
MonteCarloEstimate monte_carlo_auth_time(const AttackModel& m, std::uint64_t trials,
                                         std::uint64_t seed);

// Expected time (us) per scheme across a grid of p, with t_success taken as
// computation plus one-hop delay.
Table attack_time_sweep(const PrimitiveCosts& costs, const std::vector<double>& p_grid,
                        unsigned steps = 3, const LinkModel& link = {},
                        const std::vector<ReferenceScheme>& schemes = reference_schemes());

// 0, step, 2*step, ... strictly below 1.
std::vector<double> probability_grid(double step);

}  // namespace eaia::cost
