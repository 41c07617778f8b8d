#include "eaia/costmodel/attack_time.hpp"

#include <cmath>
#include <random>

#include "eaia/error.hpp"

namespace eaia::cost {

void AttackModel::validate() const {
  if (std::isnan(p) || p < 0) fail(ErrorKind::InvalidArgument, "p must be in [0, 1)");
  if (p >= 1) fail(ErrorKind::DegenerateProbability, "p >= 1 never succeeds");
  if (t_fail.empty()) fail(ErrorKind::InvalidArgument, "at least one step is required");
  for (double t : t_fail) {
    if (!(t >= 0)) fail(ErrorKind::InvalidArgument, "failure times must be non-negative");
  }
  if (!(t_success >= 0)) fail(ErrorKind::InvalidArgument, "success time must be non-negative");
}

AttackModel AttackModel::uniform_steps(double p, double t_success, unsigned n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "at least one step is required");
  AttackModel m;
  m.p = p;
  m.t_success = t_success;
  for (unsigned i = 1; i <= n; ++i) m.t_fail.push_back(t_success * i / n);
  return m;
}

double avg_auth_time(const AttackModel& m) {
  m.validate();
  const double n = static_cast<double>(m.steps());
  double failed = 0;
  for (double t : m.t_fail) failed += t / n * m.p;
  return (failed + m.t_success * (1 - m.p)) / (1 - m.p);
}

MonteCarloEstimate monte_carlo_auth_time(const AttackModel& m, std::uint64_t trials,
                                         std::uint64_t seed) {
  m.validate();
  if (trials == 0) fail(ErrorKind::InvalidArgument, "trials must be at least 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution attacked(m.p);
  std::uniform_int_distribution<std::size_t> step(0, m.steps() - 1);

  // Welford running mean and variance.
  double mean = 0;
  double m2 = 0;
  for (std::uint64_t k = 1; k <= trials; ++k) {
    double total = 0;
    while (attacked(rng)) total += m.t_fail[step(rng)];
    total += m.t_success;
    const double delta = total - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (total - mean);
  }
  MonteCarloEstimate est;
  est.mean = mean;
  est.trials = trials;
  if (trials > 1) {
    const double var = m2 / static_cast<double>(trials - 1);
    est.stderr_mean = std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

std::vector<double> probability_grid(double step) {
  if (!(step > 0) || step >= 1) fail(ErrorKind::InvalidArgument, "grid step must be in (0, 1)");
  std::vector<double> out;
  for (unsigned i = 0;; ++i) {
    const double p = round_to(i * step, 9);
    if (p >= 1) break;
    out.push_back(p);
  }
  return out;
}

Table attack_time_sweep(const PrimitiveCosts& costs, const std::vector<double>& p_grid,
                        unsigned steps, const LinkModel& link,
                        const std::vector<ReferenceScheme>& schemes) {
  std::vector<std::string> cols{"p"};
  std::vector<double> t_success;
  for (const auto& s : schemes) {
    cols.push_back(s.formula.name + "_us");
    const auto d = comm_delay(s.formula.message_bits, link.rate_bps, link.distance_m);
    t_success.push_back(scheme_time_us(s.formula, costs) + d.total_us());
  }
  Table t(std::move(cols));
  for (double p : p_grid) {
    std::vector<nlohmann::json> row{p};
    for (double ts : t_success) {
      row.emplace_back(round_to(avg_auth_time(AttackModel::uniform_steps(p, ts, steps)), 3));
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace eaia::cost
