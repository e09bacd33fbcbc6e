#pragma once

// Derived quantities: social cost of carbon, cost-to-value weights,
// damage-per-abatement sensitivities, the cost sensitivity to the
// full-abatement time, and cost distributions over time.

#include <cstddef>
#include <string>
#include <vector>

#include "iam/engine.hpp"

namespace iam::analysis {

using stochvar::SampleValue;

enum class SccDenominator { consumption, cost };

struct SccOptions {
  SccDenominator denominator = SccDenominator::consumption;
  /// Divide by N(t) per path.
  bool numeraire_relative = false;
};

/// SCC(t, w) = -1000 (dV*/dE(t)) / (dV*/dC(t)) per path for every model
/// time, in USD/tCO2; one reverse sweep of the pathwise welfare.
std::vector<SampleValue> scc_series(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                    const rates::RateScenarioSet& scenarios, const SccOptions& options = {});

SampleValue scc(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                const rates::RateScenarioSet& scenarios, std::size_t index, const SccOptions& options = {});

enum class WeightMode {
  local,  // d[V(t) N(0)/N(t)] / dC(t)
  total   // dV*/dC(t) per unit time, including effects on later periods
};

/// Cost-to-value weight per model time and path.
std::vector<SampleValue> cost_to_value_weight(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                              const rates::RateScenarioSet& scenarios,
                                              WeightMode mode = WeightMode::local);

enum class Weighting { none, numeraire, utility, full };

Weighting parse_weighting(const std::string& name);
std::string to_string(Weighting w);

struct SensitivityReport {
  double observation_time = 0.0;
  std::vector<double> target_times;  // s >= t
  std::vector<double> values;        // damage avoided at s per abatement cost at t, weighted
  Weighting weighting = Weighting::none;
};

/// Response of damage cost C_D(s) to a local abatement bump at t, relative
/// to the abatement cost it incurs at t, reported as damage avoided (positive
/// when abatement lowers damage). Weights: 1, N(t)/N(s), the full
/// welfare-weight ratio divided by N(t)/N(s), or the full ratio
/// (dV*/dC(s)) / (dV*/dC(t)).
SensitivityReport damage_per_abatement_sensitivity(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                                   const rates::RateScenarioSet& scenarios, std::size_t index,
                                                   Weighting weighting);

/// All four weightings from one set of sweeps.
std::vector<SensitivityReport> damage_per_abatement_sensitivities(const engine::ModelConfig& cfg,
                                                                  const policy::PolicySpec& pol,
                                                                  const rates::RateScenarioSet& scenarios,
                                                                  std::size_t index);

struct AbatementTimeSensitivity {
  std::vector<double> times;
  /// dC(t)/dT^{mu=1} weighted by -dV*/dC(t) per unit time; integrates to -dW/dT^{mu=1}.
  std::vector<double> series;
  std::vector<double> abatement;  // abatement-cost share of `series`
  std::vector<double> damage;     // damage-cost share of `series`
  std::vector<double> running_integral;
  double integral = 0.0;
  double l1_mass = 0.0;
};

AbatementTimeSensitivity cost_sensitivity_to_abatement_time(const engine::ModelConfig& cfg,
                                                            const policy::PolicySpec& reduced,
                                                            const rates::RateScenarioSet& scenarios);

struct MeanStd {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct CostDistributionReport {
  std::vector<double> times;
  MeanStd abatement, damage, total, per_gdp, discounted;
  /// C^g(t): window average of C(s) N(t)/N(s) over (t - dTg, t]; C(t) for dTg = 0.
  MeanStd generational;
  /// Window mean of C(s)/GDP(s) over (t - dTg, t].
  MeanStd generational_per_gdp;
};

CostDistributionReport cost_distribution(const engine::Trajectory& traj, const rates::RateScenarioSet& scenarios,
                                         double dTg);

}  // namespace iam::analysis
