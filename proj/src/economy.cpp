#include "iam/economy.hpp"

#include <algorithm>
#include <cmath>

#include "iam/error.hpp"

namespace iam::economy {

void EconomyConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("economy.gamma must lie in (0,1]");
  if (!(delta_capital_5y >= 0.0 && delta_capital_5y < 1.0)) {
    throw ConfigError("economy.deltaCapital5y must lie in [0,1)");
  }
  if (!(eta > 0.0) || eta == 1.0) throw ConfigError("economy.eta must be positive and different from 1");
  if (!(l0 > 0.0) || !(l_inf > 0.0)) throw ConfigError("economy population must be positive");
  if (!(k0 >= 0.0)) throw ConfigError("economy.k0 must be nonnegative");
  if (!(a0 > 0.0)) throw ConfigError("economy.a0 must be positive");
  if (!(consumption_floor >= 0.0 && consumption_floor < 1.0)) {
    throw ConfigError("economy.consumptionFloor must lie in [0,1)");
  }
}

EconomyState EconomyState::initial(const EconomyConfig& cfg) {
  EconomyState s;
  s.capital = cfg.k0;
  s.productivity = cfg.a0;
  s.population = cfg.l0;
  s.gdp = economy::gdp(s.capital, s.productivity, s.population, cfg);
  return s;
}

SampleValue step_capital(const SampleValue& k, const SampleValue& investment, double dt,
                         const EconomyConfig& cfg) {
  const double keep = std::pow(1.0 - cfg.delta_capital_5y, dt / 5.0);
  return keep * k + investment * dt;
}

SampleValue gdp(const SampleValue& capital, double productivity, double population, const EconomyConfig& cfg) {
  const double labour = std::pow(population / 1000.0, 1.0 - cfg.gamma);
  if (cfg.gamma == 1.0) return productivity * capital;
  return productivity * labour * stochvar::pow(capital, cfg.gamma);
}

double step_productivity(double a, double t, double dt, const EconomyConfig& cfg) {
  const double growth = cfg.ga * std::exp(-cfg.delta_a * t);
  if (!(growth < 1.0)) throw DomainError("productivity growth factor reached 1");
  return a / std::pow(1.0 - growth, dt / 5.0);
}

double step_population(double l, double dt, const EconomyConfig& cfg) {
  return l * std::pow(cfg.l_inf / l, cfg.g_pop * dt / 5.0);
}

Split split_consumption_investment(const SampleValue& gdp, const SampleValue& total_cost, const SampleValue& s,
                                   double floor_fraction) {
  const SampleValue net = gdp - total_cost;
  Split out;
  const SampleValue raw = (1.0 - s) * net;
  const SampleValue floor = floor_fraction * gdp;
  const std::size_t n = std::max(raw.paths(), floor.paths());
  bool bankrupt = false;
  for (std::size_t p = 0; p < n; ++p) {
    if (raw[raw.paths() == 1 ? 0 : p] < floor[floor.paths() == 1 ? 0 : p]) ++out.floored_paths;
    bankrupt = bankrupt || net[net.paths() == 1 ? 0 : p] < 0.0;
  }
  // A bankrupt economy does not disinvest below zero.
  out.investment = bankrupt ? s * stochvar::max(net, 0.0) : s * net;
  out.consumption = out.floored_paths > 0 ? stochvar::max(raw, floor) : raw;
  return out;
}

SampleValue utility(const SampleValue& consumption, double population, const EconomyConfig& cfg) {
  for (std::size_t p = 0; p < consumption.paths(); ++p) {
    if (!(consumption[p] > 0.0)) throw DomainError("utility needs positive consumption", p);
  }
  const SampleValue per_capita = consumption / (population / 1000.0);
  const double k = 1.0 - cfg.eta;
  return population * (stochvar::pow(per_capita, k) - 1.0) / k;
}

}  // namespace iam::economy
