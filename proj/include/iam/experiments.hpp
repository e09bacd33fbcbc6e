#pragma once

// Experiment drivers behind the CLI subcommands. Each returns numeric tables
// with a fixed column order; sweep points run concurrently.

#include <string>
#include <vector>

#include "iam/analysis.hpp"
#include "iam/calibration.hpp"
#include "iam/config.hpp"
#include "iam/csv.hpp"

namespace iam::experiments {

using config::Config;

/// time,mu,s,temperature_at,carbon_at,gdp,cost_abatement,cost_damage,cost_total,
/// cost_per_gdp,utility,discount_factor (path means for stochastic runs).
csv::Table trajectory_table(const engine::Trajectory& traj);

/// time,emissions,carbon_at,temperature_at,cost_damage,gdp,mu,s (path means).
csv::Table state_table(const engine::Trajectory& traj);

/// One row: the named parameters, objective, t_full_abatement, iterations, gradient_norm.
csv::Table calibration_table(const calibration::CalibrationResult& result);

/// iteration,objective
csv::Table trace_table(const calibration::CalibrationResult& result);

calibration::CalibrationOptions calibration_options(const Config& cfg);

/// Deterministic multi-start calibration under the configured objective, or a
/// single warm-started run for stochastic scenario sets.
calibration::CalibrationResult calibrate_family(const Config& cfg, policy::PolicyKind family,
                                                const objective::ObjectiveSpec& obj,
                                                const rates::RateScenarioSet& scenarios);

struct CalibrationRun {
  calibration::CalibrationResult result;
  engine::Trajectory trajectory;
};

/// `calibrate`: the configured family (free-form starts from the reduced optimum).
CalibrationRun calibrate(const Config& cfg);

/// rate,t_full_abatement,savings
csv::Table sweep_rate(const Config& cfg);

/// volatility,t_full_abatement_left,savings_left,t_full_abatement_right,savings_right
csv::Table sweep_vol(const Config& cfg);

/// quantile,t_full_abatement,savings
csv::Table sweep_quantile(const Config& cfg);

/// funding_period,t_full_abatement,savings,generational_cost_per_gdp_max,
/// generational_cost_per_gdp_min,generational_cost_per_gdp_ratio
csv::Table sweep_funding(const Config& cfg);

/// Max/min ratio of the path-mean generational cost per GDP over the grid.
double generational_cost_ratio(const analysis::CostDistributionReport& report);

/// time, then mean and stddev of each component of the report.
csv::Table cost_distribution_table(const analysis::CostDistributionReport& report);

struct AbatementDistribution {
  calibration::CalibrationResult reduced;       // expectation objective
  calibration::CalibrationResult expectation;  // stochastic-linear, expectation
  calibration::CalibrationResult shortfall;    // stochastic-linear, left-tail ES
  std::vector<double> t_full_expectation;      // per path
  std::vector<double> t_full_shortfall;
  csv::Table histogram;  // bin_lower,bin_upper,count_expectation,count_shortfall
  csv::Table summary;    // objective,statistic,mean,stddev,skewness,finite_paths per run
  analysis::CostDistributionReport cost_reduced;
  analysis::CostDistributionReport cost_stochastic;
};

AbatementDistribution abatement_distribution(const Config& cfg);

struct Convergence {
  std::vector<double> horizons;
  std::vector<calibration::CalibrationResult> results;
  std::vector<csv::Table> states;
  /// horizon,t_full_abatement,savings,max_relative_deviation
  csv::Table summary;
};

/// Calibrates the reduced family for each horizon and compares the state
/// series against the longest horizon over [0, compare_until].
Convergence convergence(const Config& cfg);

/// Largest relative deviation between two state tables on rows with time <= until.
double max_relative_deviation(const csv::Table& a, const csv::Table& b, double until);

struct SensitivityRun {
  std::vector<analysis::SensitivityReport> reports;
  analysis::AbatementTimeSensitivity time_sensitivity;
  csv::Table damage_per_abatement;  // target_time,lag,none,numeraire,utility,full
  csv::Table cost_sensitivity;      // time,series,abatement,damage,running_integral
};

/// Sensitivities at the reduced optimum.
SensitivityRun sensitivity(const Config& cfg);

/// Histogram of the finite entries of `a` and `b` on common bins.
csv::Table histogram(const std::vector<double>& a, const std::vector<double>& b, std::size_t bins);

}  // namespace iam::experiments
