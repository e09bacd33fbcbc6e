#include "iam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iam/error.hpp"
#include "iam/parallel.hpp"

namespace iam::experiments {

using calibration::CalibrationResult;
using policy::PolicyKind;
using stochvar::expectation;

namespace {

double mean_of(const stochvar::SampleValue& v) { return expectation(v); }

rates::RateScenarioSet hull_white(const Config& cfg, double volatility, std::size_t paths) {
  rates::RateModelSpec spec = cfg.model.rates;
  spec.kind = rates::RateModelKind::hull_white;
  spec.volatility = volatility;
  spec.paths = paths;
  return rates::generate_scenarios(spec, cfg.model.grid());
}

objective::ObjectiveSpec shortfall(const objective::ObjectiveSpec& base, double alpha, stochvar::Tail tail) {
  objective::ObjectiveSpec obj = base;
  obj.statistic = stochvar::Statistic::shortfall(alpha, tail);
  return obj;
}

// Config copy with deterministic, constant rates at r0.
Config deterministic(const Config& cfg) {
  Config out = cfg;
  out.model.rates.kind = rates::RateModelKind::constant;
  out.model.rates.volatility = 0.0;
  return out;
}

CalibrationResult deterministic_optimum(const Config& cfg) {
  const Config det = deterministic(cfg);
  return calibrate_family(det, PolicyKind::reduced, det.model.objective, engine::scenarios_for(det.model));
}

CalibrationResult warm_calibration(const Config& cfg, PolicyKind family, const objective::ObjectiveSpec& obj,
                                   const rates::RateScenarioSet& scenarios, const policy::PolicySpec& start) {
  calibration::CalibrationOptions options = calibration_options(cfg);
  options.warm_start = start;
  options.starts = 1;
  return calibration::calibrate(cfg.model, family, obj, scenarios, options);
}

}  // namespace

// Tables ----------------------------------------------------------------------------

csv::Table trajectory_table(const engine::Trajectory& traj) {
  csv::Table t;
  t.header = {"time",        "mu",          "s",           "temperature_at", "carbon_at",  "gdp",
              "cost_abatement", "cost_damage", "cost_total", "cost_per_gdp",   "utility", "discount_factor"};
  for (std::size_t i = 0; i < traj.steps(); ++i) {
    t.add({traj.time(i), mean_of(traj.mu[i]), mean_of(traj.s[i]), mean_of(traj.temperature_at[i]),
           mean_of(traj.carbon_at[i]), mean_of(traj.gdp[i]), mean_of(traj.cost_abatement[i]),
           mean_of(traj.cost_damage[i]), mean_of(traj.cost_total[i]),
           mean_of(traj.cost_total[i].detached() / traj.gdp[i].detached()), mean_of(traj.utility[i]),
           mean_of(traj.discount_factor[i])});
  }
  return t;
}

csv::Table state_table(const engine::Trajectory& traj) {
  csv::Table t;
  t.header = {"time", "emissions", "carbon_at", "temperature_at", "cost_damage", "gdp", "mu", "s"};
  for (std::size_t i = 0; i < traj.steps(); ++i) {
    t.add({traj.time(i), mean_of(traj.emissions[i]), mean_of(traj.carbon_at[i]), mean_of(traj.temperature_at[i]),
           mean_of(traj.cost_damage[i]), mean_of(traj.gdp[i]), mean_of(traj.mu[i]), mean_of(traj.s[i])});
  }
  return t;
}

csv::Table calibration_table(const CalibrationResult& result) {
  csv::Table t;
  t.header = result.names;
  for (const char* name : {"objective", "t_full_abatement", "iterations", "gradient_norm"}) t.header.push_back(name);
  std::vector<double> row = result.parameters;
  row.insert(row.end(), {result.objective, result.t_full_abatement, static_cast<double>(result.iterations),
                         result.gradient_norm});
  t.add(std::move(row));
  return t;
}

csv::Table trace_table(const CalibrationResult& result) {
  csv::Table t;
  t.header = {"iteration", "objective"};
  for (std::size_t k = 0; k < result.trace.size(); ++k) t.add({static_cast<double>(k + 1), result.trace[k]});
  return t;
}

csv::Table cost_distribution_table(const analysis::CostDistributionReport& r) {
  csv::Table t;
  t.header = {"time"};
  const std::pair<const char*, const analysis::MeanStd*> parts[] = {
      {"cost_abatement", &r.abatement},   {"cost_damage", &r.damage},
      {"cost_total", &r.total},           {"cost_per_gdp", &r.per_gdp},
      {"cost_discounted", &r.discounted}, {"cost_generational", &r.generational},
      {"generational_cost_per_gdp", &r.generational_per_gdp}};
  for (const auto& [name, _] : parts) {
    t.header.push_back(std::string(name) + "_mean");
    t.header.push_back(std::string(name) + "_stddev");
  }
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    std::vector<double> row{r.times[i]};
    for (const auto& [_, ms] : parts) {
      row.push_back(ms->mean[i]);
      row.push_back(ms->stddev[i]);
    }
    t.add(std::move(row));
  }
  return t;
}

csv::Table histogram(const std::vector<double>& a, const std::vector<double>& b, std::size_t bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : {&a, &b}) {
    for (double x : *v) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  csv::Table t;
  t.header = {"bin_lower", "bin_upper", "count_expectation", "count_shortfall"};
  if (!std::isfinite(lo)) return t;
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> ca(bins, 0.0), cb(bins, 0.0);
  auto fill = [&](const std::vector<double>& v, std::vector<double>& c) {
    for (double x : v) {
      if (!std::isfinite(x)) continue;
      std::size_t k = static_cast<std::size_t>((x - lo) / width);
      c[std::min(k, bins - 1)] += 1.0;
    }
  };
  fill(a, ca);
  fill(b, cb);
  for (std::size_t k = 0; k < bins; ++k) {
    t.add({lo + width * static_cast<double>(k), lo + width * static_cast<double>(k + 1), ca[k], cb[k]});
  }
  return t;
}

// Calibration -----------------------------------------------------------------------

calibration::CalibrationOptions calibration_options(const Config& cfg) {
  calibration::CalibrationOptions options;
  options.adam = cfg.experiment.adam;
  options.chunk_paths = cfg.experiment.chunk_paths;
  return options;
}

CalibrationResult calibrate_family(const Config& cfg, PolicyKind family, const objective::ObjectiveSpec& obj,
                                   const rates::RateScenarioSet& scenarios) {
  if (!scenarios.stochastic() || family == PolicyKind::free_form) {
    if (family == PolicyKind::free_form) {
      const CalibrationResult reduced = calibrate_family(cfg, PolicyKind::reduced, obj, scenarios);
      return warm_calibration(cfg, family, obj, scenarios, reduced.policy);
    }
    return calibration::calibrate(cfg.model, family, obj, scenarios, calibration_options(cfg));
  }
  const CalibrationResult start = deterministic_optimum(cfg);
  const CalibrationResult reduced = warm_calibration(cfg, PolicyKind::reduced, obj, scenarios, start.policy);
  if (family == PolicyKind::reduced) return reduced;
  return warm_calibration(cfg, family, obj, scenarios, reduced.policy);
}

CalibrationRun calibrate(const Config& cfg) {
  const rates::RateScenarioSet scenarios = engine::scenarios_for(cfg.model);
  CalibrationRun run;
  run.result = calibrate_family(cfg, cfg.experiment.family, cfg.model.objective, scenarios);
  run.trajectory = engine::simulate(cfg.model, run.result.policy, scenarios);
  return run;
}

// Sweeps ------------------------------------------------------------------------------

csv::Table sweep_rate(const Config& cfg) {
  const auto& levels = cfg.experiment.rates;
  std::vector<CalibrationResult> results(levels.size());
  parallel_for(levels.size(), [&](std::size_t k) {
    Config c = deterministic(cfg);
    c.model.rates.r0 = levels[k];
    results[k] = calibrate_family(c, PolicyKind::reduced, c.model.objective, engine::scenarios_for(c.model));
  });
  csv::Table t;
  t.header = {"rate", "t_full_abatement", "savings"};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    t.add({levels[k], results[k].t_full_abatement, results[k].parameters[1]});
  }
  return t;
}

csv::Table sweep_vol(const Config& cfg) {
  const auto& vols = cfg.experiment.volatilities;
  const CalibrationResult start = deterministic_optimum(cfg);
  std::vector<CalibrationResult> left(vols.size()), right(vols.size());
  parallel_for(2 * vols.size(), [&](std::size_t job) {
    const std::size_t k = job / 2;
    const stochvar::Tail tail = job % 2 == 0 ? stochvar::Tail::left : stochvar::Tail::right;
    const rates::RateScenarioSet scenarios = hull_white(cfg, vols[k], cfg.experiment.calibration_paths);
    const auto obj = shortfall(cfg.model.objective, cfg.experiment.alpha, tail);
    (tail == stochvar::Tail::left ? left : right)[k] =
        warm_calibration(cfg, PolicyKind::reduced, obj, scenarios, start.policy);
  });
  csv::Table t;
  t.header = {"volatility", "t_full_abatement_left", "savings_left", "t_full_abatement_right", "savings_right"};
  for (std::size_t k = 0; k < vols.size(); ++k) {
    t.add({vols[k], left[k].t_full_abatement, left[k].parameters[1], right[k].t_full_abatement,
           right[k].parameters[1]});
  }
  return t;
}

csv::Table sweep_quantile(const Config& cfg) {
  const auto& levels = cfg.experiment.quantiles;
  const CalibrationResult start = deterministic_optimum(cfg);
  const rates::RateScenarioSet scenarios =
      hull_white(cfg, cfg.experiment.volatility, cfg.experiment.calibration_paths);
  std::vector<CalibrationResult> results(levels.size());
  parallel_for(levels.size(), [&](std::size_t k) {
    const auto obj = shortfall(cfg.model.objective, levels[k], cfg.experiment.quantile_tail);
    results[k] = warm_calibration(cfg, PolicyKind::reduced, obj, scenarios, start.policy);
  });
  csv::Table t;
  t.header = {"quantile", "t_full_abatement", "savings"};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    t.add({levels[k], results[k].t_full_abatement, results[k].parameters[1]});
  }
  return t;
}

double generational_cost_ratio(const analysis::CostDistributionReport& report) {
  const auto& v = report.generational_per_gdp.mean;
  if (v.empty()) return std::nan("");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

csv::Table sweep_funding(const Config& cfg) {
  const auto& periods = cfg.experiment.funding_periods;
  std::vector<CalibrationResult> results(periods.size());
  std::vector<analysis::CostDistributionReport> reports(periods.size());
  parallel_for(periods.size(), [&](std::size_t k) {
    Config c = cfg;
    c.model.costs.funding_period = periods[k];
    const rates::RateScenarioSet scenarios = engine::scenarios_for(c.model);
    results[k] = calibrate_family(c, PolicyKind::reduced, c.model.objective, scenarios);
    const engine::Trajectory traj = engine::simulate(c.model, results[k].policy, scenarios);
    reports[k] = analysis::cost_distribution(traj, scenarios, cfg.experiment.generation_span);
  });
  csv::Table t;
  t.header = {"funding_period",
              "t_full_abatement",
              "savings",
              "generational_cost_per_gdp_max",
              "generational_cost_per_gdp_min",
              "generational_cost_per_gdp_ratio"};
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const auto& v = reports[k].generational_per_gdp.mean;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    t.add({periods[k], results[k].t_full_abatement, results[k].parameters[1], *hi, *lo,
           generational_cost_ratio(reports[k])});
  }
  return t;
}

// Stochastic abatement ------------------------------------------------------------------

AbatementDistribution abatement_distribution(const Config& cfg) {
  const rates::RateScenarioSet scenarios =
      hull_white(cfg, cfg.experiment.volatility, cfg.experiment.calibration_paths);
  const objective::ObjectiveSpec obj_e = cfg.model.objective;
  const objective::ObjectiveSpec obj_s = shortfall(obj_e, cfg.experiment.alpha, stochvar::Tail::left);

  AbatementDistribution out;
  const CalibrationResult start = deterministic_optimum(cfg);
  out.reduced = warm_calibration(cfg, PolicyKind::reduced, obj_e, scenarios, start.policy);
  out.expectation = warm_calibration(cfg, PolicyKind::stochastic_linear, obj_e, scenarios, out.reduced.policy);
  out.shortfall = warm_calibration(cfg, PolicyKind::stochastic_linear, obj_s, scenarios, out.expectation.policy);

  const std::size_t steps = cfg.model.steps();
  out.t_full_expectation =
      policy::time_to_full_abatement(out.expectation.policy, scenarios, steps).t_full_abatement.to_vector(
          scenarios.paths());
  out.t_full_shortfall =
      policy::time_to_full_abatement(out.shortfall.policy, scenarios, steps).t_full_abatement.to_vector(
          scenarios.paths());
  out.histogram = histogram(out.t_full_expectation, out.t_full_shortfall, cfg.experiment.bins);

  out.summary.header = {"run", "objective", "mean", "stddev", "skewness", "finite_paths"};
  auto summarize = [&](double id, const CalibrationResult& r, const std::vector<double>& t_full) {
    std::vector<double> finite;
    for (double x : t_full) {
      if (std::isfinite(x)) finite.push_back(x);
    }
    const stochvar::SampleValue v(finite.empty() ? std::vector<double>{std::nan("")} : finite);
    out.summary.add({id, r.objective, expectation(v), stochvar::stddev(v), stochvar::skewness(v),
                     static_cast<double>(finite.size())});
  };
  const std::vector<double> reduced_t(scenarios.paths(), out.reduced.t_full_abatement);
  summarize(0, out.reduced, reduced_t);
  summarize(1, out.expectation, out.t_full_expectation);
  summarize(2, out.shortfall, out.t_full_shortfall);

  const double dTg = cfg.experiment.generation_span;
  out.cost_reduced =
      analysis::cost_distribution(engine::simulate(cfg.model, out.reduced.policy, scenarios), scenarios, dTg);
  out.cost_stochastic =
      analysis::cost_distribution(engine::simulate(cfg.model, out.expectation.policy, scenarios), scenarios, dTg);
  return out;
}

// Horizon robustness --------------------------------------------------------------------

double max_relative_deviation(const csv::Table& a, const csv::Table& b, double until) {
  const std::size_t time_col = a.column("time");
  double worst = 0.0;
  const std::size_t rows = std::min(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (a.rows[i][time_col] > until + 1e-9) break;
    if (std::abs(a.rows[i][time_col] - b.rows[i][time_col]) > 1e-9) throw Error("state tables use different grids");
    for (const char* name : {"emissions", "carbon_at", "temperature_at", "cost_damage", "gdp"}) {
      const std::size_t c = a.column(name);
      const double x = a.rows[i][c];
      const double y = b.rows[i][b.column(name)];
      const double scale = std::max(std::abs(x), std::abs(y));
      if (scale > 0.0) worst = std::max(worst, std::abs(x - y) / scale);
    }
  }
  return worst;
}

Convergence convergence(const Config& cfg) {
  Convergence out;
  out.horizons = cfg.experiment.horizons;
  const std::size_t n = out.horizons.size();
  out.results.resize(n);
  out.states.resize(n);
  parallel_for(n, [&](std::size_t k) {
    Config c = cfg;
    c.model.horizon = out.horizons[k];
    const rates::RateScenarioSet scenarios = engine::scenarios_for(c.model);
    out.results[k] = calibrate_family(c, PolicyKind::reduced, c.model.objective, scenarios);
    out.states[k] = state_table(engine::simulate(c.model, out.results[k].policy, scenarios));
  });
  const std::size_t longest =
      static_cast<std::size_t>(std::max_element(out.horizons.begin(), out.horizons.end()) - out.horizons.begin());
  out.summary.header = {"horizon", "t_full_abatement", "savings", "max_relative_deviation"};
  for (std::size_t k = 0; k < n; ++k) {
    const double until = std::min(cfg.experiment.compare_until, out.horizons[k]);
    out.summary.add({out.horizons[k], out.results[k].t_full_abatement, out.results[k].parameters[1],
                     max_relative_deviation(out.states[k], out.states[longest], until)});
  }
  return out;
}

// Sensitivities ---------------------------------------------------------------------------

SensitivityRun sensitivity(const Config& cfg) {
  const rates::RateScenarioSet scenarios = engine::scenarios_for(cfg.model);
  const CalibrationResult opt = calibrate_family(cfg, PolicyKind::reduced, cfg.model.objective, scenarios);
  const rates::TimeGrid grid = cfg.model.grid();
  const std::size_t index = grid.first_at_or_after(cfg.experiment.sensitivity_time);

  SensitivityRun run;
  run.reports = analysis::damage_per_abatement_sensitivities(cfg.model, opt.policy, scenarios, index);
  run.time_sensitivity = analysis::cost_sensitivity_to_abatement_time(cfg.model, opt.policy, scenarios);

  run.damage_per_abatement.header = {"target_time", "lag", "none", "numeraire", "utility", "full"};
  const auto& first = run.reports.front();
  for (std::size_t j = 0; j < first.target_times.size(); ++j) {
    std::vector<double> row{first.target_times[j], first.target_times[j] - first.observation_time};
    for (const auto& r : run.reports) row.push_back(r.values[j]);
    run.damage_per_abatement.add(std::move(row));
  }
  const auto& s = run.time_sensitivity;
  run.cost_sensitivity.header = {"time", "series", "abatement", "damage", "running_integral"};
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    run.cost_sensitivity.add({s.times[i], s.series[i], s.abatement[i], s.damage[i], s.running_integral[i]});
  }
  return run;
}

}  // namespace iam::experiments
