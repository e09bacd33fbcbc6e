#include "iam/analysis.hpp"

#include <cmath>

#include "iam/error.hpp"

namespace iam::analysis {

using stochvar::Adjoints;
using stochvar::Samples;
using stochvar::Tape;

namespace {

// Recorded zero per step; stochastic when the scenario set is, so that the
// adjoints stay per path.
std::vector<SampleValue> zero_probes(Tape& tape, std::size_t steps, const rates::RateScenarioSet& scenarios) {
  std::vector<SampleValue> out;
  out.reserve(steps);
  const std::size_t paths = scenarios.stochastic() ? scenarios.paths() : 0;
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(tape.variable(paths > 0 ? SampleValue(std::vector<double>(paths, 0.0)) : SampleValue(0.0)));
  }
  return out;
}

SampleValue as_value(const Samples& s) { return SampleValue(s); }

// d output / d v per path; zero when `output` or `v` is not on the tape.
Samples derivative(const Tape& tape, const SampleValue& output, const SampleValue& v) {
  if (!output.recorded() || !tape.contains(output) || !tape.contains(v)) return Samples(0.0);
  return tape.reverse(output).of(v);
}

double mean_of(const Samples& s) {
  double sum = 0.0;
  for (double v : s.span()) sum += v;
  return sum / static_cast<double>(s.size());
}

double at(const Samples& s, std::size_t p) { return s[s.deterministic() ? 0 : p]; }

MeanStd summarize(const std::vector<SampleValue>& series) {
  MeanStd out;
  out.mean.reserve(series.size());
  out.stddev.reserve(series.size());
  for (const auto& v : series) {
    out.mean.push_back(stochvar::expectation(v));
    out.stddev.push_back(stochvar::stddev(v));
  }
  return out;
}

// Window average over grid points in (t - dTg, t] with dt weights.
std::vector<SampleValue> window_average(const std::vector<SampleValue>& x, const rates::TimeGrid& grid, double dTg) {
  if (dTg <= 0.0) return x;
  const std::size_t n = x.size();
  std::vector<SampleValue> prefix(n + 1, SampleValue(0.0));
  std::vector<double> covered(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + x[i] * grid.dt(i);
    covered[i + 1] = covered[i] + grid.dt(i);
  }
  std::vector<SampleValue> out(n);
  std::size_t lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (grid.time(lo) <= grid.time(i) - dTg + 1e-9) ++lo;
    out[i] = (prefix[i + 1] - prefix[lo]) / (covered[i + 1] - covered[lo]);
  }
  return out;
}

}  // namespace

// SCC -----------------------------------------------------------------------------

std::vector<SampleValue> scc_series(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                    const rates::RateScenarioSet& scenarios, const SccOptions& options) {
  const std::size_t n = cfg.steps();
  Tape tape;
  engine::Probes probes;
  probes.emission = zero_probes(tape, n, scenarios);
  auto& denominator = options.denominator == SccDenominator::consumption ? probes.consumption : probes.cost;
  denominator = zero_probes(tape, n, scenarios);
  const engine::Trajectory traj = engine::simulate(cfg, pol.detached(), scenarios, &probes);
  const SampleValue welfare = engine::welfare(traj, scenarios).aggregate;
  const Adjoints adj = tape.reverse(welfare);

  std::vector<SampleValue> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Samples de = adj.of(probes.emission[i]);
    const Samples dc = adj.of(denominator[i]);
    std::vector<double> v(de.size());
    for (std::size_t p = 0; p < v.size(); ++p) {
      if (dc[p] == 0.0) throw DomainError("SCC denominator vanishes", p, i);
      v[p] = -1000.0 * de[p] / dc[p];
      if (options.numeraire_relative) v[p] /= scenarios.numeraire[i][scenarios.numeraire[i].paths() == 1 ? 0 : p];
    }
    out.push_back(de.deterministic() ? SampleValue(v.front()) : SampleValue(std::move(v)));
  }
  return out;
}

SampleValue scc(const engine::ModelConfig& cfg, const policy::PolicySpec& pol, const rates::RateScenarioSet& scenarios,
                std::size_t index, const SccOptions& options) {
  const auto series = scc_series(cfg, pol, scenarios, options);
  if (index >= series.size()) throw Error("SCC requested off grid");
  return series[index];
}

// Cost-to-value weight ---------------------------------------------------------------

std::vector<SampleValue> cost_to_value_weight(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                              const rates::RateScenarioSet& scenarios, WeightMode mode) {
  const std::size_t n = cfg.steps();
  Tape tape;
  engine::Probes probes;
  probes.cost = zero_probes(tape, n, scenarios);
  const engine::Trajectory traj = engine::simulate(cfg, pol.detached(), scenarios, &probes);
  std::vector<SampleValue> out;
  out.reserve(n);
  if (mode == WeightMode::total) {
    const Adjoints adj = tape.reverse(engine::welfare(traj, scenarios).aggregate);
    for (std::size_t i = 0; i < n; ++i) out.push_back(as_value(adj.of(probes.cost[i])) / traj.grid.dt(i));
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const SampleValue discounted = traj.utility[i] * traj.discount_factor[i];
    out.push_back(as_value(derivative(tape, discounted, probes.cost[i])));
  }
  return out;
}

// Damage per abatement -----------------------------------------------------------------

Weighting parse_weighting(const std::string& name) {
  if (name == "none") return Weighting::none;
  if (name == "numeraire") return Weighting::numeraire;
  if (name == "utility") return Weighting::utility;
  if (name == "full") return Weighting::full;
  throw ConfigError("unknown weighting '" + name + "'");
}

std::string to_string(Weighting w) {
  switch (w) {
    case Weighting::none:
      return "none";
    case Weighting::numeraire:
      return "numeraire";
    case Weighting::utility:
      return "utility";
    case Weighting::full:
      return "full";
  }
  return "none";
}

std::vector<SensitivityReport> damage_per_abatement_sensitivities(const engine::ModelConfig& cfg,
                                                                  const policy::PolicySpec& pol,
                                                                  const rates::RateScenarioSet& scenarios,
                                                                  std::size_t index) {
  const std::size_t n = cfg.steps();
  if (index >= n) throw Error("sensitivity observation time off grid");
  const policy::PolicySpec plain = pol.detached();
  const std::size_t paths = scenarios.stochastic() ? scenarios.paths() : 1;

  // Welfare weight of a unit cost at each time.
  Tape weight_tape;
  engine::Probes weight_probes;
  weight_probes.cost = zero_probes(weight_tape, n, scenarios);
  const engine::Trajectory wtraj = engine::simulate(cfg, plain, scenarios, &weight_probes);
  const Adjoints wadj = weight_tape.reverse(engine::welfare(wtraj, scenarios).aggregate);
  std::vector<Samples> weight(n);
  for (std::size_t i = index; i < n; ++i) weight[i] = wadj.of(weight_probes.cost[i]);

  // Direct responses to a local abatement bump with the economy held fixed.
  Tape tape;
  engine::Probes probes;
  probes.detach_economy = true;
  probes.mu.assign(n, SampleValue(0.0));
  probes.mu[index] = zero_probes(tape, 1, scenarios).front();
  const engine::Trajectory traj = engine::simulate(cfg, plain, scenarios, &probes);
  const SampleValue& bump = probes.mu[index];
  const Samples d_abatement = derivative(tape, traj.cost_incurred[index], bump);
  const double denom = mean_of(d_abatement);
  if (denom == 0.0) throw DomainError("abatement cost does not respond to the bump", std::nullopt, index);

  std::vector<SensitivityReport> reports;
  for (Weighting w : {Weighting::none, Weighting::numeraire, Weighting::utility, Weighting::full}) {
    SensitivityReport r;
    r.observation_time = traj.time(index);
    r.weighting = w;
    reports.push_back(std::move(r));
  }
  const Samples& df_t = traj.discount_factor[index].samples();
  for (std::size_t s = index; s < n; ++s) {
    const Samples d_damage = derivative(tape, traj.cost_damage[s], bump);
    const Samples& df_s = traj.discount_factor[s].samples();
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t p = 0; p < paths; ++p) {
      const double response = -at(d_damage, p);
      const double numeraire = at(df_s, p) / at(df_t, p);
      const double full = at(weight[s], p) / at(weight[index], p);
      acc[0] += response;
      acc[1] += response * numeraire;
      acc[2] += response * full / numeraire;
      acc[3] += response * full;
    }
    for (std::size_t k = 0; k < 4; ++k) {
      reports[k].target_times.push_back(traj.time(s));
      reports[k].values.push_back(acc[k] / static_cast<double>(paths) / denom);
    }
  }
  return reports;
}

SensitivityReport damage_per_abatement_sensitivity(const engine::ModelConfig& cfg, const policy::PolicySpec& pol,
                                                   const rates::RateScenarioSet& scenarios, std::size_t index,
                                                   Weighting weighting) {
  auto all = damage_per_abatement_sensitivities(cfg, pol, scenarios, index);
  return all[static_cast<std::size_t>(weighting)];
}

// Cost sensitivity to the full-abatement time ------------------------------------------

AbatementTimeSensitivity cost_sensitivity_to_abatement_time(const engine::ModelConfig& cfg,
                                                            const policy::PolicySpec& reduced,
                                                            const rates::RateScenarioSet& scenarios) {
  if (reduced.kind != policy::PolicyKind::reduced) throw ConfigError("cost sensitivity needs a reduced policy");
  const std::size_t n = cfg.steps();
  const policy::PolicySpec plain = reduced.detached();
  const std::size_t paths = scenarios.stochastic() ? scenarios.paths() : 1;

  // Welfare weight of a unit cost, seeded with the objective's statistic.
  Tape weight_tape;
  engine::Probes weight_probes;
  weight_probes.cost = zero_probes(weight_tape, n, scenarios);
  const engine::Trajectory wtraj = engine::simulate(cfg, plain, scenarios, &weight_probes);
  const SampleValue agg = engine::objective_samples(wtraj, cfg.objective, scenarios);
  const Adjoints wadj = weight_tape.reverse(agg, stochvar::statistic_weights(cfg.objective.statistic, agg));

  // Per-path a0 so that the direct cost responses stay per path.
  Tape tape;
  policy::PolicySpec probe = plain;
  const double a0 = plain.a0.scalar();
  probe.a0 = tape.variable(paths > 1 ? SampleValue(std::vector<double>(paths, a0)) : SampleValue(a0));
  engine::Probes detach;
  detach.detach_economy = true;
  const engine::Trajectory traj = engine::simulate(cfg, probe, scenarios, &detach);

  const double mu0 = plain.mu0.scalar();
  const double t_full = policy::full_abatement_time(mu0, a0);
  const double da0_dT = -(1.0 - mu0) / (t_full * t_full);

  AbatementTimeSensitivity out;
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = traj.grid.dt(i);
    const Samples w = wadj.of(weight_probes.cost[i]);
    const Samples da = derivative(tape, traj.cost_abatement[i], probe.a0);
    const Samples dd = derivative(tape, traj.cost_damage[i], probe.a0);
    double sa = 0.0;
    double sd = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
      sa += -at(w, p) * at(da, p);
      sd += -at(w, p) * at(dd, p);
    }
    sa *= da0_dT / dt;
    sd *= da0_dT / dt;
    out.times.push_back(traj.time(i));
    out.abatement.push_back(sa);
    out.damage.push_back(sd);
    out.series.push_back(sa + sd);
    running += (sa + sd) * dt;
    out.running_integral.push_back(running);
    out.l1_mass += std::abs(sa + sd) * dt;
  }
  out.integral = running;
  return out;
}

// Cost distribution ------------------------------------------------------------------

CostDistributionReport cost_distribution(const engine::Trajectory& traj, const rates::RateScenarioSet& scenarios,
                                         double dTg) {
  if (dTg < 0.0) throw Error("generation span must be >= 0");
  const std::size_t n = traj.steps();
  std::vector<SampleValue> ca(n), cd(n), c(n), per_gdp(n), discounted(n);
  for (std::size_t i = 0; i < n; ++i) {
    ca[i] = traj.cost_abatement[i].detached();
    cd[i] = traj.cost_damage[i].detached();
    c[i] = traj.cost_total[i].detached();
    per_gdp[i] = c[i] / traj.gdp[i].detached();
    discounted[i] = c[i] * traj.discount_factor[i].detached();
  }
  std::vector<SampleValue> generational = window_average(discounted, traj.grid, dTg);
  for (std::size_t i = 0; i < n; ++i) generational[i] = generational[i] * scenarios.numeraire[i];
  const std::vector<SampleValue> generational_per_gdp = window_average(per_gdp, traj.grid, dTg);

  CostDistributionReport out;
  for (std::size_t i = 0; i < n; ++i) out.times.push_back(traj.time(i));
  out.abatement = summarize(ca);
  out.damage = summarize(cd);
  out.total = summarize(c);
  out.per_gdp = summarize(per_gdp);
  out.discounted = summarize(discounted);
  out.generational = summarize(generational);
  out.generational_per_gdp = summarize(generational_per_gdp);
  return out;
}

}  // namespace iam::analysis
