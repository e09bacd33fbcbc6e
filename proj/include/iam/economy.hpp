#pragma once

// Capital, productivity, population, GDP, the consumption/investment split
// and CRRA utility.

#include <cstddef>

#include "iam/stochvar.hpp"

namespace iam::economy {

using stochvar::SampleValue;

struct EconomyConfig {
  double gamma = 0.3;
  double delta_capital_5y = 0.1;
  double a0 = 5.115;
  double ga = 0.076;
  double delta_a = 0.005;
  double l0 = 7403.0;
  double l_inf = 11500.0;
  double g_pop = 0.134;
  double eta = 1.45;
  double k0 = 223.0;
  /// Consumption floor as a fraction of GDP when costs exceed output.
  double consumption_floor = 1e-6;

  void validate() const;
};

struct EconomyState {
  SampleValue capital;
  double productivity = 0.0;
  double population = 0.0;
  SampleValue gdp;

  static EconomyState initial(const EconomyConfig& cfg);
};

/// (1 - delta)^{dt/5} K + I dt.
SampleValue step_capital(const SampleValue& k, const SampleValue& investment, double dt,
                         const EconomyConfig& cfg);

/// A K^gamma (L/1000)^{1-gamma}.
SampleValue gdp(const SampleValue& capital, double productivity, double population, const EconomyConfig& cfg);

/// A / (1 - ga exp(-deltaA t))^{dt/5}.
double step_productivity(double a, double t, double dt, const EconomyConfig& cfg);

/// L (L_inf / L)^{gPop dt/5}.
double step_population(double l, double dt, const EconomyConfig& cfg);

struct Split {
  SampleValue consumption;
  SampleValue investment;
  /// Paths on which the consumption floor was active.
  std::size_t floored_paths = 0;
};

/// Investment s (GDP - C), floored at 0; consumption (1 - s)(GDP - C) floored at floor*GDP.
Split split_consumption_investment(const SampleValue& gdp, const SampleValue& total_cost, const SampleValue& s,
                                   double floor_fraction = 0.0);

/// L ((C / (L/1000))^{1-eta} - 1) / (1 - eta).
SampleValue utility(const SampleValue& consumption, double population, const EconomyConfig& cfg);

}  // namespace iam::economy
