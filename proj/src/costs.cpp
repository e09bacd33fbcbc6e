#include "iam/costs.hpp"

#include <cmath>

#include "iam/error.hpp"

namespace iam::costs {

CostConfig CostConfig::dice2016() {
  CostConfig cfg;
  cfg.backstop_price_decay_rate = -std::log(1.0 - 0.025) / 5.0;
  return cfg;
}

void CostConfig::validate() const {
  if (!(theta > 1.0)) throw ConfigError("costs.theta must be > 1");
  if (!(a2 >= 0.0)) throw ConfigError("costs.a2 must be >= 0");
  if (!(funding_period >= 0.0)) throw ConfigError("costs.fundingPeriod must be >= 0");
  if (!(backstop_price_initial >= 0.0)) throw ConfigError("costs.backstopPriceInitial must be >= 0");
  if (dc_mode != DcMode::none) {
    if (!(dc_threshold > 0.0)) throw ConfigError("costs.dcThreshold must be > 0");
    if (!(dc_strength >= 0.0)) throw ConfigError("costs.dcStrength must be >= 0");
    if (!(dc_power > 0.0)) throw ConfigError("costs.dcPower must be > 0");
  }
}

double backstop_price(double t, const CostConfig& cfg) {
  return cfg.backstop_price_initial * std::exp(-cfg.backstop_price_decay_rate * t);
}

SampleValue abatement_cost_rate(const SampleValue& mu, double t, const CostConfig& cfg) {
  for (std::size_t p = 0; p < mu.paths(); ++p) {
    if (!(mu[p] >= 0.0 && mu[p] <= 1.0 + 1e-12)) throw DomainError("abatement mu outside [0,1]", p);
  }
  return backstop_price(t, cfg) * stochvar::pow(mu, cfg.theta) / cfg.theta;
}

SampleValue damage_fraction(const SampleValue& t_at, const CostConfig& cfg) {
  const SampleValue q = cfg.a2 * t_at * t_at;
  return q / (1.0 + q);
}

SampleValue default_compensation_factor(const SampleValue& x, const CostConfig& cfg) {
  if (cfg.dc_strength == 0.0) return SampleValue(1.0);
  bool active = false;
  for (std::size_t p = 0; p < x.paths() && !active; ++p) active = x[p] > cfg.dc_threshold;
  if (!active) return SampleValue(1.0);
  const SampleValue excess = stochvar::max((x - cfg.dc_threshold) / cfg.dc_threshold, 0.0);
  return 1.0 + cfg.dc_strength * stochvar::pow(excess, cfg.dc_power);
}

SampleValue default_compensation(const SampleValue& cost_raw, const SampleValue& numeraire,
                                 const SampleValue& gdp, const CostConfig& cfg) {
  switch (cfg.dc_mode) {
    case DcMode::none:
      return cost_raw;
    case DcMode::numeraire_relative:
      return cost_raw * default_compensation_factor(cost_raw / numeraire, cfg);
    case DcMode::gdp_relative:
      return cost_raw * default_compensation_factor(cost_raw / gdp, cfg);
  }
  return cost_raw;
}

FundedAmount fund_abatement(const SampleValue& c_mu, std::size_t index, const rates::RateScenarioSet& scenarios,
                            double funding_period, std::size_t model_steps) {
  const auto& grid = scenarios.grid;
  FundedAmount out;
  if (funding_period <= 0.0) {
    out.maturity_index = index;
    out.maturity = grid.time(index);
    out.amount = c_mu;
    return out;
  }
  const double t = grid.time(index);
  std::size_t m = grid.first_at_or_after(t + funding_period);
  if (m >= model_steps) m = model_steps - 1;
  out.maturity_index = m;
  out.maturity = grid.time(m);
  const double tenor = out.maturity - t;
  if (tenor <= 0.0) {
    out.amount = c_mu;
    return out;
  }
  const SampleValue fr = rates::forward_rate_at(scenarios, index, tenor);
  out.amount = c_mu * (1.0 + fr * tenor);
  return out;
}

void FundingLedger::add(const FundedAmount& funded) {
  if (funded.maturity_index >= due_.size()) throw Error("funded amount matures off the ledger");
  due_[funded.maturity_index] += funded.amount;
}

CostBreakdown total_cost_at(std::size_t index, const SampleValue& incurred, const FundingLedger& ledger,
                            const SampleValue& damage) {
  CostBreakdown out;
  out.abatement_incurred = incurred;
  out.abatement_due = ledger.due(index);
  out.damage = damage;
  out.total = out.abatement_due + out.damage;
  return out;
}

}  // namespace iam::costs
