#pragma once

// Abatement and savings-rate policies: the reduced two-parameter model, a
// free-form per-step table, and abatement speeds adapted to the short rate.

#include <cstddef>
#include <string>
#include <vector>

#include "iam/rates.hpp"
#include "iam/stochvar.hpp"

namespace iam::policy {

using stochvar::SampleValue;

enum class PolicyKind { reduced, free_form, stochastic_linear, stochastic_quadratic };

PolicyKind parse_kind(const std::string& name);
std::string to_string(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::reduced;
  SampleValue mu0 = 0.03;
  SampleValue a0 = 0.0097;
  SampleValue a1 = 0.0;
  SampleValue a2 = 0.0;
  SampleValue s0 = 0.25;
  /// Per-step values for the free-form kind.
  std::vector<SampleValue> mu_table;
  std::vector<SampleValue> s_table;

  /// Checks parameter ranges; `steps` is the model step count for tables.
  void validate(std::size_t steps) const;
  /// Copy with every parameter disconnected from its tape.
  PolicySpec detached() const;
};

struct PolicyValue {
  SampleValue mu;
  SampleValue s;
};

/// mu = min(mu0 + max(speed, 0) t, 1) with speed a0 (+ a1 r + a2 r^2); the
/// free-form kind reads step `index` of its tables. Both outputs lie in [0,1].
PolicyValue evaluate_policy(const PolicySpec& spec, std::size_t index, double t, const SampleValue& r_t);

struct AbatementSummary {
  /// First model time with mu = 1 per path; +infinity if never reached.
  SampleValue t_full_abatement;
};

AbatementSummary time_to_full_abatement(const PolicySpec& spec, const rates::RateScenarioSet& scenarios,
                                        std::size_t steps);

/// (1 - mu0)/a0 for the reduced model, +infinity for a0 <= 0.
double full_abatement_time(double mu0, double a0);

}  // namespace iam::policy
