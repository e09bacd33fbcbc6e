#pragma once

// Gradient-based policy calibration: ADAM ascent on any objective, with
// gradients from reverse sweeps over the model pipeline.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "iam/engine.hpp"

namespace iam::calibration {

using stochvar::SampleValue;

struct AdamOptions {
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;
  /// Learning rate at iteration k is learning_rate / (1 + decay k).
  double decay = 0.0;
};

struct AdamResult {
  std::vector<double> x;  // best-seen point
  double value = -std::numeric_limits<double>::infinity();
  double gradient_norm = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // objective per iteration
};

/// f(x, grad) returns the objective and writes its gradient. Maximises.
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;
AdamResult adam_maximize(const ObjectiveFn& f, std::vector<double> x0, const AdamOptions& options);

/// Maps unconstrained optimiser coordinates to a policy.
class Parameterization {
 public:
  Parameterization(policy::PolicyKind kind, const policy::PolicySpec& base, std::size_t steps);

  policy::PolicyKind kind() const { return kind_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  /// Policy whose free parameters are built from `x` (recorded or plain).
  policy::PolicySpec build(const std::vector<SampleValue>& x) const;
  policy::PolicySpec build(const std::vector<double>& x) const;
  /// Optimiser coordinates reproducing `spec` (free-form values are clamped
  /// into the open unit interval first).
  std::vector<double> coordinates(const policy::PolicySpec& spec) const;
  /// Named physical parameter values of `spec`.
  std::vector<double> physical(const policy::PolicySpec& spec) const;

 private:
  policy::PolicyKind kind_;
  policy::PolicySpec base_;
  std::size_t steps_;
  std::vector<std::string> names_;
  std::vector<double> scale_;
};

struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;  // with respect to the optimiser coordinates
  SampleValue samples;           // per-path aggregate (detached)
};

/// Objective and gradient at `x`. Stochastic scenario sets are processed in
/// chunks of `chunk_paths` paths, each on its own tape.
Evaluation evaluate(const engine::ModelConfig& cfg, const Parameterization& par, const std::vector<double>& x,
                    const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios,
                    bool with_gradient = true, std::size_t chunk_paths = 250);

struct CalibrationOptions {
  AdamOptions adam;
  /// Starting policy; the defaults below are used when absent.
  std::optional<policy::PolicySpec> warm_start;
  /// Deterministic multi-start count for the reduced family.
  std::size_t starts = 3;
  std::size_t chunk_paths = 250;
};

struct CalibrationResult {
  policy::PolicySpec policy;
  std::vector<std::string> names;
  std::vector<double> parameters;
  double objective = 0.0;
  std::vector<double> trace;
  double gradient_norm = 0.0;
  int iterations = 0;
  /// (1 - mu0)/a0 for the parametric families.
  double t_full_abatement = std::numeric_limits<double>::infinity();
};

CalibrationResult calibrate(const engine::ModelConfig& cfg, policy::PolicyKind family,
                            const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios,
                            const CalibrationOptions& options = {});

/// dW/dT^{mu=1} for a reduced policy, from dW/da0 and a0 = (1 - mu0)/T.
double first_order_condition_check(const engine::ModelConfig& cfg, const policy::PolicySpec& reduced,
                                   const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios);

}  // namespace iam::calibration
