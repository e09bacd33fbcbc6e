#pragma once

// The full model pipeline on a time grid, across all Monte-Carlo paths.

#include <cstddef>
#include <vector>

#include "iam/climate.hpp"
#include "iam/costs.hpp"
#include "iam/economy.hpp"
#include "iam/objective.hpp"
#include "iam/policy.hpp"
#include "iam/rates.hpp"
#include "iam/stochvar.hpp"

namespace iam::engine {

using stochvar::SampleValue;

struct ModelConfig {
  double horizon = 500.0;
  double dt = 1.0;
  climate::ClimateConfig climate = climate::ClimateConfig::dice2016();
  economy::EconomyConfig economy;
  costs::CostConfig costs = costs::CostConfig::dice2016();
  policy::PolicySpec policy;
  objective::ObjectiveSpec objective;
  rates::RateModelSpec rates;

  rates::TimeGrid grid() const { return rates::TimeGrid::uniform(horizon, dt); }
  std::size_t steps() const;
  void validate() const;
};

struct ModelState {
  climate::ClimateState climate;
  economy::EconomyState economy;
};

/// Additive perturbations applied inside the pipeline, one entry per step
/// (an empty vector disables that probe). Recorded zero-valued entries expose
/// pipeline adjoints; non-zero entries give finite-difference bumps.
struct Probes {
  std::vector<SampleValue> cost;         // added to C(t) before the split
  std::vector<SampleValue> emission;     // added to E(t)
  std::vector<SampleValue> consumption;  // added to consumption before utility
  std::vector<SampleValue> mu;           // added to mu(t) after the policy clip
  /// Treat GDP as a constant where it enters emissions and costs, so cost
  /// derivatives only see the direct policy and climate channels.
  bool detach_economy = false;
};

struct Trajectory {
  rates::TimeGrid grid;
  std::vector<SampleValue> mu, s;
  std::vector<SampleValue> temperature_at, temperature_lo;
  std::vector<SampleValue> carbon_at, carbon_uo, carbon_lo;
  std::vector<SampleValue> capital, gdp;
  std::vector<double> productivity, population, emission_intensity;
  std::vector<SampleValue> emissions;
  std::vector<SampleValue> cost_incurred;  // C_mu
  std::vector<SampleValue> cost_abatement; // C_A
  std::vector<SampleValue> damage_raw;     // Omega GDP before DC*
  std::vector<SampleValue> cost_damage;    // C_D
  std::vector<SampleValue> cost_total;     // C
  std::vector<SampleValue> consumption, investment, utility;
  std::vector<SampleValue> discount_factor, short_rate;
  /// Path-steps on which the consumption floor was active.
  std::size_t floored = 0;
  ModelState final_state;

  std::size_t steps() const { return mu.size(); }
  double time(std::size_t i) const { return grid.time(i); }
};

Trajectory simulate(const ModelConfig& cfg, const policy::PolicySpec& policy,
                    const rates::RateScenarioSet& scenarios, const Probes* probes = nullptr);

inline Trajectory simulate(const ModelConfig& cfg, const rates::RateScenarioSet& scenarios) {
  return simulate(cfg, cfg.policy, scenarios);
}

objective::WelfareSeries welfare(const Trajectory& traj, const rates::RateScenarioSet& scenarios);

/// Per-path aggregate and its statistic for the given objective.
SampleValue objective_samples(const Trajectory& traj, const objective::ObjectiveSpec& spec,
                              const rates::RateScenarioSet& scenarios);
double objective(const Trajectory& traj, const objective::ObjectiveSpec& spec,
                 const rates::RateScenarioSet& scenarios);

/// Scenario set as configured in `cfg.rates` on `cfg.grid()`.
rates::RateScenarioSet scenarios_for(const ModelConfig& cfg);

}  // namespace iam::engine
