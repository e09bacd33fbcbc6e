#include "iam/objective.hpp"

#include <string>

#include "iam/error.hpp"

namespace iam::objective {

void ObjectiveSpec::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("objective.p must lie in (0,1]");
  if (!(generation_span >= 0.0)) throw ConfigError("objective.generationSpan must be >= 0");
  if (statistic.kind == stochvar::Statistic::Kind::expected_shortfall &&
      !(statistic.alpha > 0.0 && statistic.alpha <= 1.0)) {
    throw ConfigError("objective.alpha must lie in (0,1]");
  }
}

WelfareSeries aggregate_welfare(const std::vector<SampleValue>& v, const rates::RateScenarioSet& scenarios) {
  const auto& grid = scenarios.grid;
  if (v.size() != grid.steps()) {
    throw Error("welfare series has " + std::to_string(v.size()) + " entries, grid has " +
                std::to_string(grid.steps()) + " steps");
  }
  WelfareSeries out;
  out.per_time = v;
  out.discounted.reserve(v.size());
  SampleValue sum(0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    SampleValue d = v[i] * rates::discount_factor_at(scenarios, i);
    sum += d * grid.dt(i);
    out.discounted.push_back(std::move(d));
  }
  out.aggregate = sum;
  return out;
}

namespace {

// x_i = N(0)/N(t_i) * window average, i.e. the discounted window sum over
// the covered length. Prefix sums keep this linear in the step count.
std::vector<SampleValue> discounted_window_average(const std::vector<SampleValue>& discounted,
                                                   const rates::TimeGrid& grid, double dTg) {
  const std::size_t n = discounted.size();
  std::vector<SampleValue> out(n);
  if (dTg <= 0.0) return discounted;
  std::vector<SampleValue> prefix(n + 1, SampleValue(0.0));
  std::vector<double> covered(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + discounted[i] * grid.dt(i);
    covered[i + 1] = covered[i] + grid.dt(i);
  }
  std::size_t lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.time(i);
    while (grid.time(lo) <= t - dTg + 1e-9) ++lo;
    out[i] = (prefix[i + 1] - prefix[lo]) / (covered[i + 1] - covered[lo]);
  }
  return out;
}

}  // namespace

std::vector<SampleValue> generational_average_welfare(const WelfareSeries& series,
                                                      const rates::RateScenarioSet& scenarios, double dTg) {
  if (dTg < 0.0) throw Error("generation span must be >= 0");
  if (dTg == 0.0) return series.per_time;
  const auto x = discounted_window_average(series.discounted, scenarios.grid, dTg);
  std::vector<SampleValue> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scenarios.numeraire[i];
  return out;
}

SampleValue aggregate_samples(const ObjectiveSpec& spec, const WelfareSeries& series,
                              const rates::RateScenarioSet& scenarios) {
  if (spec.aggregation == Aggregation::classical) return series.aggregate;

  const auto& grid = scenarios.grid;
  std::vector<SampleValue> discounted = series.discounted;
  if (spec.utility_offset != 0.0) {
    for (std::size_t i = 0; i < discounted.size(); ++i) {
      discounted[i] = (series.per_time[i] + spec.utility_offset) * rates::discount_factor_at(scenarios, i);
    }
  }
  const auto x = discounted_window_average(discounted, grid, spec.generation_span);
  if (spec.p == 1.0) {
    SampleValue sum(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * grid.dt(i);
    return sum;
  }
  SampleValue sum(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t p = 0; p < x[i].paths(); ++p) {
      if (!(x[i][p] > 0.0)) {
        throw DomainError("p-norm aggregation needs positive welfare (set objective.utilityOffset)", p, i);
      }
    }
    sum += stochvar::pow(x[i], spec.p) * grid.dt(i);
  }
  return stochvar::pow(sum, 1.0 / spec.p);
}

double objective_value(const ObjectiveSpec& spec, const WelfareSeries& series,
                       const rates::RateScenarioSet& scenarios) {
  return stochvar::apply(spec.statistic, aggregate_samples(spec, series, scenarios));
}

}  // namespace iam::objective
