#include "iam/rates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "iam/error.hpp"

namespace iam::rates {

namespace {

constexpr double kGridTolerance = 1e-9;

// B(t,T) = (1 - exp(-a tau))/a, tau = T - t, with the a -> 0 limit.
double hw_b(double a, double tau) {
  if (a < 1e-12) return tau;
  return -std::expm1(-a * tau) / a;
}

// Variance of the Ornstein-Uhlenbeck factor over dt.
double hw_step_variance(double a, double sigma, double dt) {
  if (a < 1e-12) return sigma * sigma * dt;
  return sigma * sigma * (-std::expm1(-2.0 * a * dt)) / (2.0 * a);
}

// Deterministic shift phi(t) such that r(t) = x(t) + phi(t) fits the curve.
double hw_shift(const RateModelSpec& spec, const ForwardCurve& curve, double t) {
  const double a = spec.mean_reversion;
  const double s = spec.volatility;
  const double b = hw_b(a, t);
  return curve.rate(t) + 0.5 * s * s * b * b;
}

}  // namespace

// TimeGrid ----------------------------------------------------------------

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("time grid needs at least two points");
  if (std::abs(points_.front()) > kGridTolerance) throw ConfigError("time grid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("horizon and dt must be positive");
  const double n_real = horizon / dt;
  const auto n = static_cast<std::size_t>(std::llround(n_real));
  if (n == 0 || std::abs(n_real - static_cast<double>(n)) > 1e-9 * std::max(1.0, n_real)) {
    throw ConfigError("horizon must be an integral multiple of dt");
  }
  std::vector<double> points(n + 1);
  for (std::size_t i = 0; i <= n; ++i) points[i] = static_cast<double>(i) * dt;
  return TimeGrid(std::move(points));
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), t - kGridTolerance);
  if (it == points_.end() || std::abs(*it - t) > kGridTolerance) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

std::size_t TimeGrid::first_at_or_after(double t) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), t - kGridTolerance);
  return static_cast<std::size_t>(it - points_.begin());
}

// ForwardCurve ------------------------------------------------------------

ForwardCurve::ForwardCurve(std::vector<std::pair<double, double>> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ConfigError("rate curve table is empty");
  std::sort(nodes_.begin(), nodes_.end());
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i].first > nodes_[i - 1].first)) throw ConfigError("rate curve times must be distinct");
  }
}

double ForwardCurve::rate(double t) const {
  if (nodes_.empty()) return 0.0;
  if (t <= nodes_.front().first) return nodes_.front().second;
  if (t >= nodes_.back().first) return nodes_.back().second;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                                   [](double v, const auto& n) { return v < n.first; });
  const auto& [t1, r1] = *it;
  const auto& [t0, r0] = *(it - 1);
  return r0 + (r1 - r0) * (t - t0) / (t1 - t0);
}

double ForwardCurve::primitive(double t) const {
  // Integral from 0 to t of the piecewise-linear rate.
  if (nodes_.empty()) return 0.0;
  double acc = 0.0;
  double prev_t = 0.0;
  double prev_r = rate(0.0);
  for (const auto& [tn, rn] : nodes_) {
    if (tn <= prev_t) continue;
    const double end = std::min(tn, t);
    const double r_end = rate(end);
    acc += 0.5 * (prev_r + r_end) * (end - prev_t);
    prev_t = end;
    prev_r = r_end;
    if (end >= t) return acc;
  }
  return acc + prev_r * (t - prev_t);
}

double ForwardCurve::integral(double t0, double t1) const {
  if (nodes_.size() == 1) return nodes_.front().second * (t1 - t0);
  return primitive(t1) - primitive(t0);
}

double ForwardCurve::discount(double t) const { return std::exp(-integral(0.0, t)); }

// RateModelSpec -------------------------------------------------------------

ForwardCurve RateModelSpec::initial_curve() const {
  if (curve.empty()) return ForwardCurve(r0);
  return ForwardCurve(curve);
}

void RateModelSpec::validate() const {
  if (volatility < 0.0) throw ConfigError("rates.volatility must be >= 0");
  if (mean_reversion < 0.0) throw ConfigError("rates.meanReversion must be >= 0");
  if (paths < 1) throw ConfigError("rates.paths must be >= 1");
  if (kind == RateModelKind::deterministic_curve && curve.empty()) {
    throw ConfigError("rates.curve is required for kind deterministic-curve");
  }
}

std::size_t RateScenarioSet::paths() const {
  return short_rate.empty() ? 1 : short_rate.front().paths();
}

// Scenario generation -------------------------------------------------------

RateScenarioSet generate_scenarios(const RateModelSpec& spec, const TimeGrid& grid) {
  spec.validate();
  RateScenarioSet s;
  s.grid = grid;
  s.spec = spec;
  const std::size_t n = grid.size();
  s.short_rate.reserve(n);
  s.numeraire.reserve(n);

  if (spec.kind != RateModelKind::hull_white) {
    const ForwardCurve curve = spec.kind == RateModelKind::constant ? ForwardCurve(spec.r0)
                                                                    : spec.initial_curve();
    double log_n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = curve.rate(grid.time(i));
      s.short_rate.emplace_back(r);
      s.numeraire.emplace_back(std::exp(log_n));
      if (i + 1 < n) log_n += r * grid.dt(i);
    }
    return s;
  }

  const ForwardCurve curve = spec.initial_curve();
  const std::size_t paths = spec.paths;
  const double a = spec.mean_reversion;
  std::vector<double> shift(n);
  std::vector<double> decay(n), stdev(n);
  for (std::size_t i = 0; i < n; ++i) {
    shift[i] = hw_shift(spec, curve, grid.time(i));
    if (i + 1 < n) {
      const double dt = grid.dt(i);
      decay[i] = std::exp(-a * dt);
      stdev[i] = std::sqrt(hw_step_variance(a, spec.volatility, dt));
    }
  }

  // Path-major generation with one PRNG substream per path.
  std::vector<std::vector<double>> r(n, std::vector<double>(paths));
  std::vector<std::vector<double>> num(n, std::vector<double>(paths));
  for (std::size_t p = 0; p < paths; ++p) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = 0.0;
    double log_n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = x + shift[i];
      r[i][p] = rate;
      num[i][p] = std::exp(log_n);
      if (i + 1 < n) {
        log_n += rate * grid.dt(i);
        x = x * decay[i] + stdev[i] * normal(rng);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.short_rate.emplace_back(std::move(r[i]));
    s.numeraire.emplace_back(std::move(num[i]));
  }
  return s;
}

RateScenarioSet slice_paths(const RateScenarioSet& s, std::size_t begin, std::size_t end) {
  if (!s.stochastic()) return s;
  if (!(begin < end && end <= s.paths())) throw Error("path slice out of range");
  RateScenarioSet out;
  out.grid = s.grid;
  out.spec = s.spec;
  out.spec.paths = end - begin;
  const auto take = [&](const SampleValue& v) {
    const auto span = v.samples().span();
    return SampleValue(std::vector<double>(span.begin() + static_cast<std::ptrdiff_t>(begin),
                                           span.begin() + static_cast<std::ptrdiff_t>(end)));
  };
  out.short_rate.reserve(s.short_rate.size());
  out.numeraire.reserve(s.numeraire.size());
  for (const auto& v : s.short_rate) out.short_rate.push_back(take(v));
  for (const auto& v : s.numeraire) out.numeraire.push_back(take(v));
  return out;
}

SampleValue discount_factor_at(const RateScenarioSet& s, std::size_t index) {
  if (index >= s.numeraire.size()) throw Error("discount factor index off grid");
  return SampleValue(1.0) / s.numeraire[index];
}

SampleValue discount_factor(const RateScenarioSet& s, double t) {
  const auto idx = s.grid.index_of(t);
  if (!idx) throw Error("discount factor requested off grid at t=" + std::to_string(t));
  return discount_factor_at(s, *idx);
}

SampleValue zero_bond(const RateScenarioSet& s, std::size_t index, double dT) {
  if (!(dT > 0.0)) throw Error("bond tenor must be positive");
  if (index >= s.grid.size()) throw Error("bond index off grid");
  const double t = s.grid.time(index);
  const ForwardCurve curve = s.spec.kind == RateModelKind::constant ? ForwardCurve(s.spec.r0)
                                                                     : s.spec.initial_curve();
  const double curve_ratio = std::exp(-curve.integral(t, t + dT));
  if (s.spec.kind != RateModelKind::hull_white) return SampleValue(curve_ratio);

  // P(t,T) = P(0,T)/P(0,t) exp(B f(0,t) - sigma^2/(4a)(1-e^{-2at}) B^2 - B r(t))
  const double a = s.spec.mean_reversion;
  const double sigma = s.spec.volatility;
  const double b = hw_b(a, dT);
  const double var_t = a < 1e-12 ? sigma * sigma * t : sigma * sigma * (-std::expm1(-2.0 * a * t)) / (2.0 * a);
  const double log_a = std::log(curve_ratio) + b * curve.rate(t) - 0.5 * var_t * b * b;
  const auto& rt = s.short_rate[index].samples();
  std::vector<double> out(rt.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::exp(log_a - b * rt[p]);
  return SampleValue(std::move(out));
}

SampleValue forward_rate_at(const RateScenarioSet& s, std::size_t index, double dT) {
  if (!(dT > 0.0)) throw Error("forward rate tenor must be positive, got " + std::to_string(dT));
  const SampleValue bond = zero_bond(s, index, dT);
  return (SampleValue(1.0) / bond - 1.0) / dT;
}

SampleValue forward_rate(const RateScenarioSet& s, double t, double dT) {
  if (!(dT > 0.0)) throw Error("forward rate tenor must be positive, got " + std::to_string(dT));
  const auto idx = s.grid.index_of(t);
  if (!idx) throw Error("forward rate requested off grid at t=" + std::to_string(t));
  return forward_rate_at(s, *idx, dT);
}

std::vector<double> effective_rate_curve(const RateScenarioSet& s) {
  const std::size_t n = s.grid.size();
  if (n < 2) throw Error("effective rate curve needs at least two grid points");
  std::vector<double> mean_df(n + 1);
  for (std::size_t i = 0; i < n; ++i) mean_df[i] = stochvar::expectation(discount_factor_at(s, i));
  // One step past the grid using the last short rate.
  const double last_dt = s.grid.dt(n - 2);
  {
    const SampleValue df = discount_factor_at(s, n - 1) * stochvar::exp(-s.short_rate[n - 1] * last_dt);
    mean_df[n] = stochvar::expectation(df);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = i + 1 < n ? s.grid.dt(i) : last_dt;
    out[i] = -std::log(mean_df[i + 1] / mean_df[i]) / dt;
  }
  return out;
}

double initial_zero_bond(const RateModelSpec& spec, double maturity) {
  return spec.initial_curve().discount(maturity);
}

}  // namespace iam::rates
