#pragma once

// Abatement and damage cost, funded abatement with forward-rate accrual, and
// the default-compensation factor that penalises large cost spikes.

#include <cstddef>
#include <vector>

#include "iam/rates.hpp"
#include "iam/stochvar.hpp"

namespace iam::costs {

using stochvar::SampleValue;

enum class DcMode { none, numeraire_relative, gdp_relative };

struct CostConfig {
  double backstop_price_initial = 0.55;
  double backstop_price_decay_rate = 0.0;
  double theta = 2.6;
  double a2 = 0.00236;
  /// Funding period dTA in years; 0 means abatement is paid when incurred.
  double funding_period = 0.0;
  DcMode dc_mode = DcMode::none;
  double dc_threshold = 0.03;
  double dc_strength = 50.0;
  double dc_power = 2.0;
  bool dc_on_abatement = false;
  bool fund_damages = false;

  static CostConfig dice2016();
  void validate() const;
};

struct CostBreakdown {
  SampleValue abatement_incurred;  // C_mu(t)
  SampleValue abatement_due;       // C_A(t)
  SampleValue damage;              // C_D(t)
  SampleValue total;               // C(t)
};

double backstop_price(double t, const CostConfig& cfg);

/// Lambda(mu, t) = backstop(t) mu^theta / theta, per GtCO2 of unabated emission.
SampleValue abatement_cost_rate(const SampleValue& mu, double t, const CostConfig& cfg);

/// Omega(T) = a2 T^2 / (1 + a2 T^2).
SampleValue damage_fraction(const SampleValue& t_at, const CostConfig& cfg);

/// DC*(x) = 1 + strength max(0, (x - threshold)/threshold)^power.
SampleValue default_compensation_factor(const SampleValue& x, const CostConfig& cfg);

/// C_D = C_D_raw DC*(x) with x relative to the numeraire or to GDP.
SampleValue default_compensation(const SampleValue& cost_raw, const SampleValue& numeraire,
                                 const SampleValue& gdp, const CostConfig& cfg);

struct FundedAmount {
  std::size_t maturity_index = 0;
  double maturity = 0.0;
  SampleValue amount;
};

/// Amount c (1 + FR(t, m; t)(m - t)) due at m, the first model time at or
/// after t + dTA. Maturities past the last model time accrue to it instead.
FundedAmount fund_abatement(const SampleValue& c_mu, std::size_t index, const rates::RateScenarioSet& scenarios,
                            double funding_period, std::size_t model_steps);

/// Funded amounts keyed by maturity index over one simulation.
class FundingLedger {
 public:
  explicit FundingLedger(std::size_t steps) : due_(steps, SampleValue(0.0)) {}

  void add(const FundedAmount& funded);
  const SampleValue& due(std::size_t index) const { return due_[index]; }
  std::size_t steps() const { return due_.size(); }

 private:
  std::vector<SampleValue> due_;
};

/// C_A(t) from the ledger and C = C_A + C_D.
CostBreakdown total_cost_at(std::size_t index, const SampleValue& incurred, const FundingLedger& ledger,
                            const SampleValue& damage);

}  // namespace iam::costs
