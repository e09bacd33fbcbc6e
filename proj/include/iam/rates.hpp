#pragma once

// Interest-rate scenarios: constant rate, deterministic curve, or Hull-White
// short rate fitted to an initial instantaneous-forward curve.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "iam/stochvar.hpp"

namespace iam::rates {

using stochvar::SampleValue;

/// Time points t_0 = 0 < t_1 < ... < t_n in years. Model series live on
/// t_0..t_{n-1}; step i spans [t_i, t_{i+1}).
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(double horizon, double dt);

  std::size_t steps() const { return points_.empty() ? 0 : points_.size() - 1; }
  std::size_t size() const { return points_.size(); }
  double time(std::size_t i) const { return points_[i]; }
  double dt(std::size_t i) const { return points_[i + 1] - points_[i]; }
  double horizon() const { return points_.back(); }
  const std::vector<double>& points() const { return points_; }

  /// Index of `t` on the grid (within 1e-9 years), if present.
  std::optional<std::size_t> index_of(double t) const;
  /// First index with time >= t (size() if beyond the grid).
  std::size_t first_at_or_after(double t) const;

 private:
  std::vector<double> points_;
};

/// Piecewise-linear instantaneous forward curve with flat extrapolation.
class ForwardCurve {
 public:
  ForwardCurve() = default;
  explicit ForwardCurve(double flat) : nodes_{{0.0, flat}} {}
  explicit ForwardCurve(std::vector<std::pair<double, double>> nodes);

  double rate(double t) const;
  /// Exact integral of the curve over [t0, t1].
  double integral(double t0, double t1) const;
  double discount(double t) const;

 private:
  double primitive(double t) const;

  std::vector<std::pair<double, double>> nodes_;
};

enum class RateModelKind { constant, deterministic_curve, hull_white };

struct RateModelSpec {
  RateModelKind kind = RateModelKind::constant;
  double r0 = 0.03;
  /// Optional (time, rate) table; hull-white fits to it, otherwise flat r0.
  std::vector<std::pair<double, double>> curve;
  double mean_reversion = 0.1;
  double volatility = 0.0;
  std::uint64_t seed = 3141;
  std::size_t paths = 5000;

  ForwardCurve initial_curve() const;
  void validate() const;
};

struct RateScenarioSet {
  TimeGrid grid;
  RateModelSpec spec;
  /// r(t_i), one entry per grid point.
  std::vector<SampleValue> short_rate;
  /// N(t_i) = exp(sum_{j<i} r(t_j) dt_j), N(0) = 1.
  std::vector<SampleValue> numeraire;

  /// Number of Monte-Carlo paths (1 for deterministic kinds).
  std::size_t paths() const;
  bool stochastic() const { return spec.kind == RateModelKind::hull_white; }
};

RateScenarioSet generate_scenarios(const RateModelSpec& spec, const TimeGrid& grid);

/// Paths [begin, end) of a scenario set; deterministic sets are returned as is.
RateScenarioSet slice_paths(const RateScenarioSet& s, std::size_t begin, std::size_t end);

/// N(0)/N(t) for t on the grid.
SampleValue discount_factor(const RateScenarioSet& s, double t);
SampleValue discount_factor_at(const RateScenarioSet& s, std::size_t index);

/// Time-t zero-coupon bond price P(t, t+dT; t) for t = grid point `index`.
SampleValue zero_bond(const RateScenarioSet& s, std::size_t index, double dT);

/// FR(t, t+dT; t) = (1/P(t,t+dT;t) - 1)/dT.
SampleValue forward_rate(const RateScenarioSet& s, double t, double dT);
SampleValue forward_rate_at(const RateScenarioSet& s, std::size_t index, double dT);

/// r_bar(t_i) = -d/dt log E[N(0)/N(t)] by forward differences on the grid.
std::vector<double> effective_rate_curve(const RateScenarioSet& s);

/// Closed-form Hull-White P(0,T) for the rate model's initial curve.
double initial_zero_bond(const RateModelSpec& spec, double maturity);

}  // namespace iam::rates
