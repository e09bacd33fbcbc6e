#include "iam/climate.hpp"

#include <algorithm>
#include <cmath>

#include "iam/error.hpp"

namespace iam::climate {

ClimateConfig ClimateConfig::dice2016() {
  ClimateConfig cfg;

  // Temperature: 5-year coefficients of the classical model.
  const double c1 = 0.1005;
  const double c3 = 0.088;
  const double c4 = 0.025;
  const double t2xco2 = 3.1;
  const double lambda = cfg.forcing_per_carbon_doubling / t2xco2;
  cfg.gamma_t = {{{-c1 * (lambda + c3) / 5.0, c1 * c3 / 5.0}, {c4 / 5.0, -c4 / 5.0}}};
  cfg.forcing_loading = {c1 / 5.0, 0.0};

  // Carbon cycle: (P5 - I)/5 from the 5-year transition matrix.
  const double b12 = 0.12;
  const double b23 = 0.007;
  const double mateq = 588.0;
  const double mueq = 360.0;
  const double mleq = 1720.0;
  const double b21 = b12 * mateq / mueq;
  const double b32 = b23 * mueq / mleq;
  cfg.gamma_m = {{{-b12 / 5.0, b21 / 5.0, 0.0},
                  {b12 / 5.0, (-b21 - b23) / 5.0, b32 / 5.0},
                  {0.0, b23 / 5.0, -b32 / 5.0}}};

  cfg.emission_intensity_rate_decay = -std::log(1.0 - 0.001) / 5.0;
  cfg.external_emissions_decay = -std::log(0.885) / 5.0;
  return cfg;
}

void ClimateConfig::validate() const {
  if (!(m0_reference > 0.0)) throw ConfigError("climate.m0Reference must be positive");
  if (!(sigma0 > 0.0)) throw ConfigError("climate.sigma0 must be positive");
  for (const auto& row : gamma_t) {
    for (double v : row) {
      if (!std::isfinite(v)) throw ConfigError("climate.gammaT must be finite");
    }
  }
  for (const auto& row : gamma_m) {
    for (double v : row) {
      if (!std::isfinite(v)) throw ConfigError("climate.gammaM must be finite");
    }
  }
  for (double m : carbon_initial) {
    if (!(m > 0.0)) throw ConfigError("climate.carbonInitial must be positive");
  }
}

ClimateState ClimateState::initial(const ClimateConfig& cfg) {
  ClimateState s;
  for (std::size_t i = 0; i < 2; ++i) s.temperature[i] = cfg.temperature_initial[i];
  for (std::size_t i = 0; i < 3; ++i) s.carbon[i] = cfg.carbon_initial[i];
  return s;
}

double interpolate(const TimeTable& table, double t) {
  if (table.empty()) return 0.0;
  if (t <= table.front().first) return table.front().second;
  if (t >= table.back().first) return table.back().second;
  const auto it = std::upper_bound(table.begin(), table.end(), t,
                                   [](double v, const auto& node) { return v < node.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double external_forcing(double t, const ClimateConfig& cfg) {
  if (!cfg.forcing_external_table.empty()) return interpolate(cfg.forcing_external_table, t);
  return cfg.forcing_external;
}

double external_emissions(double t, const ClimateConfig& cfg) {
  if (!cfg.external_emissions_table.empty()) return interpolate(cfg.external_emissions_table, t);
  return cfg.external_emissions_initial * std::exp(-cfg.external_emissions_decay * t);
}

SampleValue forcing(const SampleValue& m_at, double t, const ClimateConfig& cfg) {
  for (std::size_t p = 0; p < m_at.paths(); ++p) {
    if (!(m_at[p] > 0.0)) throw DomainError("forcing needs positive atmospheric carbon", p);
  }
  return cfg.forcing_per_carbon_doubling * stochvar::log(m_at / cfg.m0_reference) / std::log(2.0) +
         external_forcing(t, cfg);
}

std::array<SampleValue, 2> step_temperature(const ClimateState& state, const SampleValue& f, double dt,
                                            const ClimateConfig& cfg) {
  const auto& T = state.temperature;
  const auto& G = cfg.gamma_t;
  std::array<SampleValue, 2> out;
  for (std::size_t i = 0; i < 2; ++i) {
    SampleValue rate = G[i][0] * T[0] + G[i][1] * T[1];
    if (cfg.forcing_loading[i] != 0.0) rate += cfg.forcing_loading[i] * f;
    out[i] = T[i] + rate * dt;
  }
  return out;
}

std::array<SampleValue, 3> step_carbon(const ClimateState& state, const SampleValue& e, double dt,
                                       const ClimateConfig& cfg) {
  const auto& M = state.carbon;
  const auto& G = cfg.gamma_m;
  std::array<SampleValue, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    SampleValue rate = G[i][0] * M[0] + G[i][1] * M[1] + G[i][2] * M[2];
    if (i == 0) rate += cfg.c_per_co2 * e;
    out[i] = M[i] + rate * dt;
  }
  return out;
}

double emission_intensity(double t_i, double t_next, double sigma_prev, const ClimateConfig& cfg) {
  const double delta = cfg.delta_sigma0 * std::exp(-cfg.emission_intensity_rate_decay * t_i);
  return sigma_prev * std::exp(-delta * (t_next - t_i));
}

SampleValue total_emission(const SampleValue& sigma, const SampleValue& mu, const SampleValue& gdp, double t,
                           const ClimateConfig& cfg) {
  return sigma * (1.0 - mu) * gdp + external_emissions(t, cfg);
}

}  // namespace iam::climate
