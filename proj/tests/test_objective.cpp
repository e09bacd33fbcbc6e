#include <doctest.h>

#include <cmath>

#include "iam/error.hpp"
#include "iam/objective.hpp"
#include "support.hpp"

using namespace iam;
using namespace iam::objective;

namespace {

rates::RateScenarioSet constant_rate(double r, double horizon, double dt = 1.0) {
  rates::RateModelSpec s;
  s.r0 = r;
  return rates::generate_scenarios(s, rates::TimeGrid::uniform(horizon, dt));
}

rates::RateScenarioSet hull_white(double sigma, std::size_t paths, double horizon) {
  rates::RateModelSpec s;
  s.kind = rates::RateModelKind::hull_white;
  s.volatility = sigma;
  s.paths = paths;
  return rates::generate_scenarios(s, rates::TimeGrid::uniform(horizon, 1.0));
}

std::vector<SampleValue> constant_series(std::size_t n, double v) { return std::vector<SampleValue>(n, SampleValue(v)); }

ObjectiveSpec p_norm(double p, double dTg) {
  ObjectiveSpec s;
  s.aggregation = Aggregation::p_norm;
  s.p = p;
  s.generation_span = dTg;
  return s;
}

}  // namespace

TEST_CASE("aggregate welfare") {
  const auto zero = constant_rate(0.0, 10.0);
  CHECK(aggregate_welfare(constant_series(10, 1.0), zero).aggregate.scalar() == 10.0);

  const auto flat = constant_rate(0.03, 10.0);
  double oracle = 0.0;
  for (int i = 0; i < 10; ++i) oracle += std::exp(-0.03 * i);
  const WelfareSeries w = aggregate_welfare(constant_series(10, 1.0), flat);
  CHECK(w.aggregate.scalar() == doctest::Approx(oracle).epsilon(1e-14));
  // Geometric sum (1 - q^10)/(1 - q) with q = exp(-0.03).
  CHECK(w.aggregate.scalar() == doctest::Approx((1 - std::exp(-0.3)) / (1 - std::exp(-0.03))).epsilon(1e-13));
  CHECK(w.aggregate.scalar() == doctest::Approx(8.769631478).epsilon(1e-9));
  CHECK_THROWS_AS(aggregate_welfare(constant_series(9, 1.0), flat), Error);

  const auto hw = hull_white(0.0, 6, 10.0);
  const WelfareSeries s = aggregate_welfare(constant_series(10, 1.0), hw);
  for (std::size_t p = 0; p < 6; ++p) CHECK(s.aggregate[p] == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("generational average welfare") {
  const auto zero = constant_rate(0.0, 10.0);
  std::vector<SampleValue> v;
  for (int i = 0; i < 10; ++i) v.emplace_back(static_cast<double>(i));
  const WelfareSeries w = aggregate_welfare(v, zero);
  const auto identity = generational_average_welfare(w, zero, 0.0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(identity[i].scalar() == v[i].scalar());
  const auto two = generational_average_welfare(w, zero, 2.0);
  CHECK(two[5].scalar() == doctest::Approx(4.5));
  CHECK(two[0].scalar() == 0.0);

  const WelfareSeries c = aggregate_welfare(constant_series(10, 3.0), zero);
  for (const auto& x : generational_average_welfare(c, zero, 4.0)) CHECK(x.scalar() == doctest::Approx(3.0));

  // With discounting the window carries V(s) N(t)/N(s).
  const auto flat = constant_rate(0.03, 10.0);
  const WelfareSeries d = aggregate_welfare(constant_series(10, 1.0), flat);
  const auto g = generational_average_welfare(d, flat, 2.0);
  CHECK(g[5].scalar() == doctest::Approx((std::exp(0.03) + 1.0) / 2.0).epsilon(1e-13));
  CHECK_THROWS_AS(generational_average_welfare(d, flat, -1.0), Error);
}

TEST_CASE("objective value") {
  const auto flat = constant_rate(0.03, 10.0);
  const WelfareSeries w = aggregate_welfare(constant_series(10, 2.0), flat);
  ObjectiveSpec classical;
  CHECK(objective_value(classical, w, flat) == w.aggregate.scalar());
  CHECK(objective_value(p_norm(1.0, 0.0), w, flat) == doctest::Approx(w.aggregate.scalar()).epsilon(1e-12));

  const auto zero = constant_rate(0.0, 10.0);
  const WelfareSeries x = aggregate_welfare(constant_series(10, 2.0), zero);
  CHECK(objective_value(p_norm(0.25, 0.0), x, zero) == doctest::Approx(2.0 * std::pow(10.0, 4.0)).epsilon(1e-12));

  const WelfareSeries neg = aggregate_welfare(constant_series(10, -1.0), zero);
  CHECK_THROWS_AS(objective_value(p_norm(0.5, 0.0), neg, zero), DomainError);
  ObjectiveSpec shifted = p_norm(0.5, 0.0);
  shifted.utility_offset = 2.0;
  CHECK(objective_value(shifted, neg, zero) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("property: aggregate is the dt-weighted sum of discounted entries") {
  iam::testing::Gen g(89);
  for (int trial = 0; trial < 20; ++trial) {
    const double dt = trial % 2 == 0 ? 1.0 : 0.5;
    const auto set = hull_white(g.uniform(0.0, 0.02), 40, 50.0);
    const auto grid = rates::TimeGrid::uniform(50.0, dt);
    rates::RateModelSpec spec = set.spec;
    const auto s = rates::generate_scenarios(spec, grid);
    std::vector<SampleValue> v;
    for (std::size_t i = 0; i < grid.steps(); ++i) v.emplace_back(g.vector(40, -5.0, 20.0));
    const WelfareSeries w = aggregate_welfare(v, s);
    for (std::size_t p = 0; p < 40; ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < grid.steps(); ++i) sum += w.discounted[i][p] * grid.dt(i);
      CHECK(std::abs(w.aggregate[p] - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    }
  }
}

TEST_CASE("property: shortfall at level one equals the expectation objective exactly") {
  iam::testing::Gen g(97);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = hull_white(g.uniform(0.001, 0.02), g.index(2, 300), 30.0);
    std::vector<SampleValue> v;
    for (std::size_t i = 0; i < 30; ++i) v.emplace_back(g.vector(set.paths(), 1.0, 10.0));
    const WelfareSeries w = aggregate_welfare(v, set);
    ObjectiveSpec e;
    ObjectiveSpec es;
    es.statistic = stochvar::Statistic::shortfall(1.0, stochvar::Tail::left);
    CHECK(objective_value(es, w, set) == objective_value(e, w, set));
    es.statistic = stochvar::Statistic::shortfall(1.0, stochvar::Tail::right);
    CHECK(objective_value(es, w, set) == objective_value(e, w, set));
  }
}

TEST_CASE("property: left shortfall <= expectation <= right shortfall") {
  iam::testing::Gen g(101);
  for (int trial = 0; trial < 30; ++trial) {
    const auto set = hull_white(g.uniform(0.001, 0.02), 200, 30.0);
    std::vector<SampleValue> v;
    for (std::size_t i = 0; i < 30; ++i) v.emplace_back(g.vector(200, 1.0, 10.0));
    const WelfareSeries w = aggregate_welfare(v, set);
    const double alpha = g.uniform(0.01, 1.0);
    ObjectiveSpec e;
    ObjectiveSpec left;
    left.statistic = stochvar::Statistic::shortfall(alpha, stochvar::Tail::left);
    ObjectiveSpec right;
    right.statistic = stochvar::Statistic::shortfall(alpha, stochvar::Tail::right);
    const double mid = objective_value(e, w, set);
    CHECK(objective_value(left, w, set) <= mid + 1e-12 * std::abs(mid));
    CHECK(mid <= objective_value(right, w, set) + 1e-12 * std::abs(mid));
  }
}

TEST_CASE("property: p-norm with p = 1 and no window equals the classical objective") {
  iam::testing::Gen g(103);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = hull_white(g.uniform(0.0, 0.02), 50, 40.0);
    std::vector<SampleValue> v;
    for (std::size_t i = 0; i < 40; ++i) v.emplace_back(g.vector(50, -3.0, 10.0));
    const WelfareSeries w = aggregate_welfare(v, set);
    const double classical = objective_value(ObjectiveSpec{}, w, set);
    CHECK(std::abs(objective_value(p_norm(1.0, 0.0), w, set) - classical) <= 1e-12 * std::abs(classical));
  }
}

TEST_CASE("property: deterministic welfare under stochastic rates factorizes through the effective curve") {
  const auto set = hull_white(0.01, 10000, 100.0);
  std::vector<SampleValue> v;
  for (std::size_t i = 0; i < 100; ++i) v.emplace_back(5.0 + std::sin(0.1 * static_cast<double>(i)));
  const WelfareSeries w = aggregate_welfare(v, set);

  const auto rbar = rates::effective_rate_curve(set);
  rates::RateModelSpec det;
  det.kind = rates::RateModelKind::deterministic_curve;
  for (std::size_t i = 0; i < rbar.size(); ++i) det.curve.emplace_back(set.grid.time(i), rbar[i]);
  const auto d = rates::generate_scenarios(det, set.grid);
  const double oracle = aggregate_welfare(v, d).aggregate.scalar();

  const double mean = stochvar::expectation(w.aggregate);
  const double se = stochvar::stddev(w.aggregate) / std::sqrt(10000.0);
  CHECK(std::abs(mean - oracle) <= 3.0 * se + 1e-12 * std::abs(oracle));
}

TEST_CASE("objective validation") {
  ObjectiveSpec s;
  CHECK_NOTHROW(s.validate());
  s.p = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ObjectiveSpec{};
  s.p = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ObjectiveSpec{};
  s.statistic = stochvar::Statistic::shortfall(0.5, stochvar::Tail::left);
  s.statistic.alpha = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
