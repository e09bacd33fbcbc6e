#pragma once

// Two-box temperature model, three-reservoir carbon cycle, emission intensity
// and emissions. Dynamics are written as generators (per-year rates) and
// advanced with explicit Euler steps of arbitrary size.

#include <array>
#include <utility>
#include <vector>

#include "iam/stochvar.hpp"

namespace iam::climate {

using stochvar::SampleValue;

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Matrix3 = std::array<std::array<double, 3>, 3>;
using TimeTable = std::vector<std::pair<double, double>>;

struct ClimateConfig {
  Matrix2 gamma_t{};
  /// How the scalar forcing enters (T_AT, T_LO).
  std::array<double, 2> forcing_loading{};
  Matrix3 gamma_m{};
  double forcing_per_carbon_doubling = 3.6813;
  double forcing_external = 1.0;
  /// Overrides forcing_external when non-empty (piecewise linear, flat ends).
  TimeTable forcing_external_table;
  double m0_reference = 588.0;
  double c_per_co2 = 12.0 / 44.0;
  double sigma0 = 38.85 / 105.5;
  double delta_sigma0 = 0.0152;
  double emission_intensity_rate_decay = 0.0;
  double external_emissions_initial = 2.6;
  double external_emissions_decay = 0.0;
  /// Overrides the exponential external-emission path when non-empty.
  TimeTable external_emissions_table;
  std::array<double, 2> temperature_initial{0.85, 0.0068};
  std::array<double, 3> carbon_initial{851.0, 460.0, 1740.0};

  /// DICE-2016R calibration converted to per-year generators.
  static ClimateConfig dice2016();
  void validate() const;
};

struct ClimateState {
  std::array<SampleValue, 2> temperature;
  std::array<SampleValue, 3> carbon;

  static ClimateState initial(const ClimateConfig& cfg);
};

double external_forcing(double t, const ClimateConfig& cfg);
double external_emissions(double t, const ClimateConfig& cfg);

/// forcingPerCarbonDoubling * log2(m_at / M0) + external forcing at t.
SampleValue forcing(const SampleValue& m_at, double t, const ClimateConfig& cfg);

/// T + (Gamma_T T + loading * f) dt.
std::array<SampleValue, 2> step_temperature(const ClimateState& state, const SampleValue& f, double dt,
                                            const ClimateConfig& cfg);

/// M + (Gamma_M M + e_M c_per_co2 e) dt, emissions enter the atmosphere only.
std::array<SampleValue, 3> step_carbon(const ClimateState& state, const SampleValue& e, double dt,
                                       const ClimateConfig& cfg);

/// sigma(t_next) = sigma(t_i) exp(-delta_sigma(t_i) (t_next - t_i)).
double emission_intensity(double t_i, double t_next, double sigma_prev, const ClimateConfig& cfg);

/// sigma (1 - mu) GDP + external emissions at t.
SampleValue total_emission(const SampleValue& sigma, const SampleValue& mu, const SampleValue& gdp, double t,
                           const ClimateConfig& cfg);

double interpolate(const TimeTable& table, double t);

}  // namespace iam::climate
