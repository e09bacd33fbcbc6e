#include "iam/policy.hpp"

#include <cmath>
#include <limits>

#include "iam/error.hpp"

namespace iam::policy {

namespace {

SampleValue clip_unit(const SampleValue& x) { return stochvar::max(stochvar::min(x, 1.0), 0.0); }

bool within_unit(const SampleValue& x) {
  for (std::size_t p = 0; p < x.paths(); ++p) {
    if (!(x[p] >= 0.0 && x[p] <= 1.0)) return false;
  }
  return true;
}

}  // namespace

PolicyKind parse_kind(const std::string& name) {
  if (name == "reduced") return PolicyKind::reduced;
  if (name == "free-form") return PolicyKind::free_form;
  if (name == "stochastic-linear") return PolicyKind::stochastic_linear;
  if (name == "stochastic-quadratic") return PolicyKind::stochastic_quadratic;
  throw ConfigError("unknown policy kind '" + name + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::reduced:
      return "reduced";
    case PolicyKind::free_form:
      return "free-form";
    case PolicyKind::stochastic_linear:
      return "stochastic-linear";
    case PolicyKind::stochastic_quadratic:
      return "stochastic-quadratic";
  }
  return "reduced";
}

void PolicySpec::validate(std::size_t steps) const {
  if (!within_unit(mu0)) throw ConfigError("policy.mu0 must lie in [0,1]");
  if (kind == PolicyKind::free_form) {
    if (mu_table.size() < steps || s_table.size() < steps) {
      throw ConfigError("free-form policy tables are shorter than the time grid (" + std::to_string(steps) +
                        " steps)");
    }
    for (std::size_t i = 0; i < steps; ++i) {
      if (!within_unit(s_table[i])) throw ConfigError("policy.sTable values must lie in [0,1]");
    }
  } else if (!within_unit(s0)) {
    throw ConfigError("policy.s0 must lie in [0,1]");
  }
}

PolicySpec PolicySpec::detached() const {
  PolicySpec out = *this;
  for (SampleValue* v : {&out.mu0, &out.a0, &out.a1, &out.a2, &out.s0}) *v = v->detached();
  for (auto& v : out.mu_table) v = v.detached();
  for (auto& v : out.s_table) v = v.detached();
  return out;
}

PolicyValue evaluate_policy(const PolicySpec& spec, std::size_t index, double t, const SampleValue& r_t) {
  if (t < 0.0) throw DomainError("policy evaluated at negative time");
  PolicyValue out;
  if (spec.kind == PolicyKind::free_form) {
    if (index >= spec.mu_table.size() || index >= spec.s_table.size()) {
      throw DomainError("free-form policy table shorter than grid", std::nullopt, index);
    }
    out.mu = clip_unit(spec.mu_table[index]);
    out.s = clip_unit(spec.s_table[index]);
    return out;
  }

  SampleValue speed = spec.a0;
  if (spec.kind == PolicyKind::stochastic_linear || spec.kind == PolicyKind::stochastic_quadratic) {
    speed = speed + spec.a1 * r_t;
    if (spec.kind == PolicyKind::stochastic_quadratic) speed = speed + spec.a2 * r_t * r_t;
  }
  speed = stochvar::max(speed, 0.0);
  out.mu = stochvar::min(spec.mu0 + speed * t, 1.0);
  out.s = clip_unit(spec.s0);
  return out;
}

AbatementSummary time_to_full_abatement(const PolicySpec& spec, const rates::RateScenarioSet& scenarios,
                                        std::size_t steps) {
  const PolicySpec plain = spec.detached();
  const std::size_t paths = scenarios.paths();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> first(paths, inf);
  std::size_t open = paths;
  for (std::size_t i = 0; i < steps && open > 0; ++i) {
    const double t = scenarios.grid.time(i);
    const PolicyValue v = evaluate_policy(plain, i, t, scenarios.short_rate[i].detached());
    for (std::size_t p = 0; p < paths; ++p) {
      if (first[p] == inf && v.mu[v.mu.paths() == 1 ? 0 : p] >= 1.0) {
        first[p] = t;
        --open;
      }
    }
  }
  AbatementSummary out;
  out.t_full_abatement = paths == 1 && scenarios.short_rate.front().is_deterministic()
                             ? SampleValue(first.front())
                             : SampleValue(std::move(first));
  return out;
}

double full_abatement_time(double mu0, double a0) {
  if (!(a0 > 0.0)) return std::numeric_limits<double>::infinity();
  return (1.0 - mu0) / a0;
}

}  // namespace iam::policy
