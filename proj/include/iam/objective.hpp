#pragma once

// Welfare aggregation (classical discounted sum or p-power norm of the
// generational average) and the statistic applied across paths.

#include <vector>

#include "iam/rates.hpp"
#include "iam/stochvar.hpp"

namespace iam::objective {

using stochvar::SampleValue;

enum class Aggregation { classical, p_norm };

struct ObjectiveSpec {
  Aggregation aggregation = Aggregation::classical;
  stochvar::Statistic statistic = stochvar::Statistic::expectation();
  double p = 1.0;
  /// Generation span dTg in years; 0 disables the window average.
  double generation_span = 0.0;
  /// Constant added to every utility before p-power aggregation.
  double utility_offset = 0.0;

  void validate() const;
};

struct WelfareSeries {
  std::vector<SampleValue> per_time;    // V(t_i)
  std::vector<SampleValue> discounted;  // V(t_i) N(0)/N(t_i)
  SampleValue aggregate;                // sum_i V(t_i) N(0)/N(t_i) dt_i
};

/// `v` holds one utility per model step (grid points t_0..t_{n-1}).
WelfareSeries aggregate_welfare(const std::vector<SampleValue>& v, const rates::RateScenarioSet& scenarios);

/// Window average over grid points in (t - dTg, t] of V(s) N(t)/N(s),
/// weighted by dt and divided by the covered length; dTg = 0 returns V.
std::vector<SampleValue> generational_average_welfare(const WelfareSeries& series,
                                                      const rates::RateScenarioSet& scenarios, double dTg);

/// Per-path aggregate before the statistic: V* (classical) or
/// (sum_i x_i^p dt_i)^{1/p} with x_i the discounted generational average.
SampleValue aggregate_samples(const ObjectiveSpec& spec, const WelfareSeries& series,
                              const rates::RateScenarioSet& scenarios);

double objective_value(const ObjectiveSpec& spec, const WelfareSeries& series,
                       const rates::RateScenarioSet& scenarios);

}  // namespace iam::objective
