#include "iam/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "iam/error.hpp"

namespace iam::engine {

std::size_t ModelConfig::steps() const { return grid().steps(); }

void ModelConfig::validate() const {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw ConfigError("horizon and dt must be positive");
  (void)grid();
  climate.validate();
  economy.validate();
  costs.validate();
  objective.validate();
  rates.validate();
  if (policy.kind != policy::PolicyKind::free_form || !policy.mu_table.empty()) policy.validate(steps());
}

rates::RateScenarioSet scenarios_for(const ModelConfig& cfg) { return rates::generate_scenarios(cfg.rates, cfg.grid()); }

namespace {

const SampleValue* probe_at(const std::vector<SampleValue>* v, std::size_t i) {
  if (v == nullptr || v->empty()) return nullptr;
  if (i >= v->size()) throw Error("probe vector shorter than the time grid");
  return &(*v)[i];
}

}  // namespace

Trajectory simulate(const ModelConfig& cfg, const policy::PolicySpec& pol, const rates::RateScenarioSet& scenarios,
                    const Probes* probes) {
  const rates::TimeGrid& grid = scenarios.grid;
  const std::size_t n = grid.steps();
  if (std::abs(grid.horizon() - cfg.horizon) > 1e-9 || n != cfg.steps()) {
    throw Error("scenario grid does not match the configured horizon and dt");
  }
  pol.validate(n);

  const bool detach = probes != nullptr && probes->detach_economy;
  const auto* p_cost = probes ? &probes->cost : nullptr;
  const auto* p_emission = probes ? &probes->emission : nullptr;
  const auto* p_consumption = probes ? &probes->consumption : nullptr;
  const auto* p_mu = probes ? &probes->mu : nullptr;

  Trajectory out;
  out.grid = grid;
  for (auto* v : {&out.mu, &out.s, &out.temperature_at, &out.temperature_lo, &out.carbon_at, &out.carbon_uo,
                  &out.carbon_lo, &out.capital, &out.gdp, &out.emissions, &out.cost_incurred, &out.cost_abatement,
                  &out.damage_raw, &out.cost_damage, &out.cost_total, &out.consumption, &out.investment,
                  &out.utility, &out.discount_factor, &out.short_rate}) {
    v->reserve(n);
  }

  ModelState state{climate::ClimateState::initial(cfg.climate), economy::EconomyState::initial(cfg.economy)};
  double sigma = cfg.climate.sigma0;
  costs::FundingLedger abatement_ledger(n);
  costs::FundingLedger damage_ledger(n);
  const double funding = cfg.costs.funding_period;

  for (std::size_t i = 0; i < n; ++i) {
    try {
      const double t = grid.time(i);
      const double dt = grid.dt(i);
      const SampleValue& r = scenarios.short_rate[i];
      const SampleValue& numeraire = scenarios.numeraire[i];

      policy::PolicyValue pv = policy::evaluate_policy(pol, i, t, r);
      if (const auto* b = probe_at(p_mu, i)) pv.mu = pv.mu + *b;

      auto& econ = state.economy;
      econ.gdp = economy::gdp(econ.capital, econ.productivity, econ.population, cfg.economy);
      const SampleValue gdp_cost = detach ? econ.gdp.detached() : econ.gdp;

      SampleValue e = climate::total_emission(sigma, pv.mu, gdp_cost, t, cfg.climate);
      if (const auto* b = probe_at(p_emission, i)) e = e + *b;

      SampleValue incurred = costs::abatement_cost_rate(pv.mu, t, cfg.costs) * sigma * gdp_cost;
      if (cfg.costs.dc_on_abatement) incurred = costs::default_compensation(incurred, numeraire, gdp_cost, cfg.costs);
      abatement_ledger.add(costs::fund_abatement(incurred, i, scenarios, funding, n));

      const SampleValue raw_damage =
          costs::damage_fraction(state.climate.temperature[0], cfg.costs) * gdp_cost;
      SampleValue damage = costs::default_compensation(raw_damage, numeraire, gdp_cost, cfg.costs);
      if (cfg.costs.fund_damages) {
        damage_ledger.add(costs::fund_abatement(damage, i, scenarios, funding, n));
        damage = damage_ledger.due(i);
      }

      costs::CostBreakdown cost = costs::total_cost_at(i, incurred, abatement_ledger, damage);
      if (const auto* b = probe_at(p_cost, i)) cost.total = cost.total + *b;

      economy::Split split = economy::split_consumption_investment(econ.gdp, cost.total, pv.s,
                                                                   cfg.economy.consumption_floor);
      out.floored += split.floored_paths;
      if (const auto* b = probe_at(p_consumption, i)) split.consumption = split.consumption + *b;
      SampleValue v = economy::utility(split.consumption, econ.population, cfg.economy);

      out.mu.push_back(pv.mu);
      out.s.push_back(pv.s);
      out.temperature_at.push_back(state.climate.temperature[0]);
      out.temperature_lo.push_back(state.climate.temperature[1]);
      out.carbon_at.push_back(state.climate.carbon[0]);
      out.carbon_uo.push_back(state.climate.carbon[1]);
      out.carbon_lo.push_back(state.climate.carbon[2]);
      out.capital.push_back(econ.capital);
      out.gdp.push_back(econ.gdp);
      out.productivity.push_back(econ.productivity);
      out.population.push_back(econ.population);
      out.emission_intensity.push_back(sigma);
      out.emissions.push_back(e);
      out.cost_incurred.push_back(incurred);
      out.cost_abatement.push_back(cost.abatement_due);
      out.damage_raw.push_back(raw_damage);
      out.cost_damage.push_back(cost.damage);
      out.cost_total.push_back(cost.total);
      out.consumption.push_back(split.consumption);
      out.investment.push_back(split.investment);
      out.utility.push_back(std::move(v));
      out.discount_factor.push_back(rates::discount_factor_at(scenarios, i));
      out.short_rate.push_back(r);

      // Advance the state to t_{i+1}.
      const SampleValue f = climate::forcing(state.climate.carbon[0], t, cfg.climate);
      auto temperature = climate::step_temperature(state.climate, f, dt, cfg.climate);
      auto carbon = climate::step_carbon(state.climate, e, dt, cfg.climate);
      state.climate.temperature = std::move(temperature);
      state.climate.carbon = std::move(carbon);
      econ.capital = economy::step_capital(econ.capital, split.investment, dt, cfg.economy);
      econ.productivity = economy::step_productivity(econ.productivity, t, dt, cfg.economy);
      econ.population = economy::step_population(econ.population, dt, cfg.economy);
      sigma = climate::emission_intensity(t, t + dt, sigma, cfg.climate);
    } catch (const DomainError& err) {
      if (err.step()) throw;
      throw DomainError(err.message(), err.path(), i);
    }
  }
  state.economy.gdp = economy::gdp(state.economy.capital, state.economy.productivity, state.economy.population,
                                   cfg.economy);
  out.final_state = std::move(state);
  return out;
}

objective::WelfareSeries welfare(const Trajectory& traj, const rates::RateScenarioSet& scenarios) {
  return objective::aggregate_welfare(traj.utility, scenarios);
}

SampleValue objective_samples(const Trajectory& traj, const objective::ObjectiveSpec& spec,
                              const rates::RateScenarioSet& scenarios) {
  return objective::aggregate_samples(spec, welfare(traj, scenarios), scenarios);
}

double objective(const Trajectory& traj, const objective::ObjectiveSpec& spec,
                 const rates::RateScenarioSet& scenarios) {
  const double w = stochvar::apply(spec.statistic, objective_samples(traj, spec, scenarios));
  if (!std::isfinite(w)) throw NumericalError("objective is not finite");
  return w;
}

}  // namespace iam::engine

namespace iam {

std::size_t worker_count() {
  if (const char* env = std::getenv("IAM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("IAM_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace iam
