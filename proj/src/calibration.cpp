#include "iam/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "iam/error.hpp"
#include "iam/parallel.hpp"

namespace iam::calibration {

using policy::PolicyKind;
using policy::PolicySpec;

// ADAM -----------------------------------------------------------------------

AdamResult adam_maximize(const ObjectiveFn& f, std::vector<double> x, const AdamOptions& opt) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0), v(n, 0.0), g(n, 0.0);
  AdamResult out;
  out.x = x;
  double b1k = 1.0;
  double b2k = 1.0;
  for (int k = 1; k <= opt.max_iterations; ++k) {
    double value = 0.0;
    try {
      value = f(x, g);
    } catch (const DomainError&) {
      if (k == 1) throw;
      value = std::nan("");
    }
    if (!std::isfinite(value)) {
      if (k == 1) throw NumericalError("objective is not finite at the starting point");
      break;
    }
    out.iterations = k;
    out.trace.push_back(value);
    double norm = 0.0;
    for (double gi : g) norm += gi * gi;
    norm = std::sqrt(norm);
    if (value > out.value) {
      out.value = value;
      out.x = x;
      out.gradient_norm = norm;
    }
    if (norm < opt.gradient_tolerance) break;

    b1k *= opt.beta1;
    b2k *= opt.beta2;
    const double lr = opt.learning_rate / (1.0 + opt.decay * static_cast<double>(k - 1));
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
      const double mhat = m[i] / (1.0 - b1k);
      const double vhat = v[i] / (1.0 - b2k);
      x[i] += lr * mhat / (std::sqrt(vhat) + opt.epsilon);
    }
  }
  return out;
}

// Parameterization ------------------------------------------------------------

Parameterization::Parameterization(PolicyKind kind, const PolicySpec& base, std::size_t steps)
    : kind_(kind), base_(base.detached()), steps_(steps) {
  base_.kind = kind;
  switch (kind) {
    case PolicyKind::reduced:
      names_ = {"a0", "s0"};
      scale_ = {0.01, 0.25};
      break;
    case PolicyKind::stochastic_linear:
      names_ = {"a0", "a1", "s0"};
      scale_ = {0.01, 0.1, 0.25};
      break;
    case PolicyKind::stochastic_quadratic:
      names_ = {"a0", "a1", "a2", "s0"};
      scale_ = {0.01, 0.1, 1.0, 0.25};
      break;
    case PolicyKind::free_form:
      for (std::size_t i = 0; i < steps; ++i) names_.push_back("mu" + std::to_string(i));
      for (std::size_t i = 0; i < steps; ++i) names_.push_back("s" + std::to_string(i));
      scale_.assign(2 * steps, 1.0);
      break;
  }
}

PolicySpec Parameterization::build(const std::vector<SampleValue>& x) const {
  if (x.size() != size()) throw Error("parameter vector has the wrong length");
  PolicySpec spec = base_;
  switch (kind_) {
    case PolicyKind::reduced:
      spec.a0 = scale_[0] * x[0];
      spec.s0 = scale_[1] * x[1];
      break;
    case PolicyKind::stochastic_linear:
      spec.a0 = scale_[0] * x[0];
      spec.a1 = scale_[1] * x[1];
      spec.s0 = scale_[2] * x[2];
      break;
    case PolicyKind::stochastic_quadratic:
      spec.a0 = scale_[0] * x[0];
      spec.a1 = scale_[1] * x[1];
      spec.a2 = scale_[2] * x[2];
      spec.s0 = scale_[3] * x[3];
      break;
    case PolicyKind::free_form:
      spec.mu_table.resize(steps_);
      spec.s_table.resize(steps_);
      for (std::size_t i = 0; i < steps_; ++i) {
        spec.mu_table[i] = stochvar::logistic(x[i]);
        spec.s_table[i] = stochvar::logistic(x[steps_ + i]);
      }
      break;
  }
  return spec;
}

PolicySpec Parameterization::build(const std::vector<double>& x) const {
  return build(std::vector<SampleValue>(x.begin(), x.end()));
}

std::vector<double> Parameterization::coordinates(const PolicySpec& spec) const {
  const auto logit = [](double v) {
    v = std::clamp(v, 1e-4, 1.0 - 1e-4);
    return std::log(v / (1.0 - v));
  };
  std::vector<double> x(size());
  if (kind_ == PolicyKind::free_form) {
    if (spec.kind == PolicyKind::free_form) {
      for (std::size_t i = 0; i < steps_; ++i) {
        x[i] = logit(spec.mu_table.at(i).scalar());
        x[steps_ + i] = logit(spec.s_table.at(i).scalar());
      }
    } else {
      throw Error("free-form coordinates need a policy with per-step tables");
    }
    return x;
  }
  const auto p = physical(spec);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p[i] / scale_[i];
  return x;
}

std::vector<double> Parameterization::physical(const PolicySpec& spec) const {
  switch (kind_) {
    case PolicyKind::reduced:
      return {spec.a0.scalar(), spec.s0.scalar()};
    case PolicyKind::stochastic_linear:
      return {spec.a0.scalar(), spec.a1.scalar(), spec.s0.scalar()};
    case PolicyKind::stochastic_quadratic:
      return {spec.a0.scalar(), spec.a1.scalar(), spec.a2.scalar(), spec.s0.scalar()};
    case PolicyKind::free_form: {
      std::vector<double> out;
      out.reserve(2 * steps_);
      for (std::size_t i = 0; i < steps_; ++i) out.push_back(spec.mu_table.at(i).scalar());
      for (std::size_t i = 0; i < steps_; ++i) out.push_back(spec.s_table.at(i).scalar());
      return out;
    }
  }
  return {};
}

// Evaluation ------------------------------------------------------------------

namespace {

struct TapedRun {
  double value = 0.0;
  std::vector<double> gradient;
  SampleValue samples;
};

// One tape over the whole scenario set, or over a chunk with a given seed.
TapedRun taped_run(const engine::ModelConfig& cfg, const Parameterization& par, const std::vector<double>& x,
                   const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios,
                   const stochvar::Samples* seed) {
  stochvar::Tape tape;
  std::vector<SampleValue> vars;
  vars.reserve(x.size());
  for (double xi : x) vars.push_back(tape.variable(xi));
  const PolicySpec spec = par.build(vars);
  const engine::Trajectory traj = engine::simulate(cfg, spec, scenarios);
  const SampleValue agg = engine::objective_samples(traj, obj, scenarios);
  TapedRun out;
  out.samples = agg.detached();
  out.gradient.assign(x.size(), 0.0);
  if (seed == nullptr) {
    out.value = stochvar::apply(obj.statistic, agg);
    const auto grad = stochvar::gradient(tape, agg, obj.statistic);
    for (std::size_t i = 0; i < vars.size(); ++i) out.gradient[i] = grad.at(vars[i].node());
  } else if (agg.recorded()) {
    const stochvar::Adjoints adj = tape.reverse(agg, *seed);
    for (std::size_t i = 0; i < vars.size(); ++i) out.gradient[i] = adj.total(vars[i]);
  }
  return out;
}

SampleValue plain_samples(const engine::ModelConfig& cfg, const Parameterization& par, const std::vector<double>& x,
                          const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios) {
  const engine::Trajectory traj = engine::simulate(cfg, par.build(x), scenarios);
  return engine::objective_samples(traj, obj, scenarios);
}

SampleValue concatenate(const std::vector<SampleValue>& parts) {
  std::vector<double> all;
  for (const auto& p : parts) {
    const auto span = p.samples().span();
    all.insert(all.end(), span.begin(), span.end());
  }
  return SampleValue(std::move(all));
}

}  // namespace

Evaluation evaluate(const engine::ModelConfig& cfg, const Parameterization& par, const std::vector<double>& x,
                    const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios,
                    bool with_gradient, std::size_t chunk_paths) {
  Evaluation out;
  const std::size_t paths = scenarios.paths();
  const std::size_t chunk = std::max<std::size_t>(1, chunk_paths);

  if (!scenarios.stochastic() || paths <= chunk) {
    if (!with_gradient) {
      out.samples = plain_samples(cfg, par, x, obj, scenarios);
      out.value = stochvar::apply(obj.statistic, out.samples);
      return out;
    }
    TapedRun run = taped_run(cfg, par, x, obj, scenarios, nullptr);
    out.value = run.value;
    out.gradient = std::move(run.gradient);
    out.samples = std::move(run.samples);
    return out;
  }

  const std::size_t chunks = (paths + chunk - 1) / chunk;
  std::vector<rates::RateScenarioSet> parts(chunks);
  for (std::size_t k = 0; k < chunks; ++k) {
    parts[k] = rates::slice_paths(scenarios, k * chunk, std::min(paths, (k + 1) * chunk));
  }

  const bool needs_weights_first = obj.statistic.kind != stochvar::Statistic::Kind::expectation;
  std::vector<SampleValue> pieces(chunks);
  if (needs_weights_first || !with_gradient) {
    parallel_for(chunks, [&](std::size_t k) { pieces[k] = plain_samples(cfg, par, x, obj, parts[k]); });
    out.samples = concatenate(pieces);
    out.value = stochvar::apply(obj.statistic, out.samples);
    if (!with_gradient) return out;
  }

  const stochvar::Samples weights =
      needs_weights_first ? stochvar::statistic_weights(obj.statistic, out.samples)
                          : stochvar::Samples(std::vector<double>(paths, 1.0 / static_cast<double>(paths)));
  std::vector<std::vector<double>> grads(chunks);
  parallel_for(chunks, [&](std::size_t k) {
    const std::size_t begin = k * chunk;
    const std::size_t end = std::min(paths, begin + chunk);
    std::vector<double> w(end - begin);
    for (std::size_t p = begin; p < end; ++p) w[p - begin] = weights[p];
    const stochvar::Samples seed(std::move(w));
    TapedRun run = taped_run(cfg, par, x, obj, parts[k], &seed);
    grads[k] = std::move(run.gradient);
    if (!needs_weights_first) pieces[k] = std::move(run.samples);
  });
  if (!needs_weights_first) {
    out.samples = concatenate(pieces);
    out.value = stochvar::apply(obj.statistic, out.samples);
  }
  out.gradient.assign(x.size(), 0.0);
  for (const auto& g : grads) {
    for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += g[i];
  }
  return out;
}

// Calibration -------------------------------------------------------------------

namespace {

std::vector<PolicySpec> default_starts(PolicyKind family, const PolicySpec& base, std::size_t steps,
                                       std::size_t count) {
  std::vector<PolicySpec> starts;
  PolicySpec s = base.detached();
  s.kind = family;
  if (family == PolicyKind::free_form) {
    // Generic start: a linear abatement ramp over the first century and a
    // constant savings rate.
    s.mu_table.resize(steps);
    s.s_table.assign(steps, 0.25);
    for (std::size_t i = 0; i < steps; ++i) {
      s.mu_table[i] = std::min(0.999, s.mu0.scalar() + 0.0097 * static_cast<double>(i));
    }
    starts.push_back(s);
    return starts;
  }
  if (family == PolicyKind::reduced) {
    const double a0s[] = {0.0097, 0.005, 0.02};
    const double s0s[] = {0.25, 0.2, 0.3};
    for (std::size_t k = 0; k < std::max<std::size_t>(1, std::min<std::size_t>(count, 3)); ++k) {
      s.a0 = a0s[k];
      s.s0 = s0s[k];
      starts.push_back(s);
    }
    return starts;
  }
  s.a0 = 0.0097;
  s.a1 = 0.0;
  s.a2 = 0.0;
  s.s0 = 0.25;
  starts.push_back(s);
  return starts;
}

}  // namespace

CalibrationResult calibrate(const engine::ModelConfig& cfg, PolicyKind family, const objective::ObjectiveSpec& obj,
                            const rates::RateScenarioSet& scenarios, const CalibrationOptions& options) {
  const std::size_t steps = cfg.steps();
  const Parameterization par(family, cfg.policy, steps);
  if (par.size() == 0) throw ConfigError("policy family has no free parameters");

  std::vector<PolicySpec> starts;
  if (options.warm_start) {
    PolicySpec s = options.warm_start->detached();
    if (family == PolicyKind::free_form && s.kind != PolicyKind::free_form) {
      // Tabulate the parametric policy on its deterministic rate path.
      PolicySpec table = s;
      table.kind = PolicyKind::free_form;
      table.mu_table.clear();
      table.s_table.clear();
      rates::RateModelSpec flat;
      flat.r0 = cfg.rates.r0;
      const rates::RateScenarioSet det = rates::generate_scenarios(flat, cfg.grid());
      for (std::size_t i = 0; i < steps; ++i) {
        const auto v = policy::evaluate_policy(s, i, det.grid.time(i), det.short_rate[i]);
        table.mu_table.push_back(v.mu.scalar());
        table.s_table.push_back(v.s.scalar());
      }
      s = table;
    }
    s.kind = family;
    starts.push_back(s);
  } else {
    starts = default_starts(family, cfg.policy, steps, options.starts);
  }

  CalibrationResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  for (const PolicySpec& start : starts) {
    const std::vector<double> x0 = par.coordinates(start);
    const Evaluation e0 = evaluate(cfg, par, x0, obj, scenarios, false, options.chunk_paths);
    if (!std::isfinite(e0.value)) throw NumericalError("objective is not finite at the starting point");
    // The tolerance applies to the gradient of W/|W0|; ADAM itself sees the
    // raw gradient so that its epsilon does not swamp weakly coupled
    // coordinates (late free-form steps).
    const double norm = std::abs(e0.value) > 0.0 ? std::abs(e0.value) : 1.0;
    const ObjectiveFn f = [&](const std::vector<double>& x, std::vector<double>& g) {
      Evaluation e = evaluate(cfg, par, x, obj, scenarios, true, options.chunk_paths);
      g = std::move(e.gradient);
      return e.value;
    };
    AdamOptions adam = options.adam;
    adam.gradient_tolerance *= norm;
    const AdamResult r = adam_maximize(f, x0, adam);
    if (r.value > best.objective) {
      best.policy = par.build(r.x);
      best.objective = r.value;
      best.trace = r.trace;
      best.gradient_norm = r.gradient_norm / norm;
      best.iterations = r.iterations;
    }
  }

  // Report a fresh evaluation at the returned parameters.
  best.policy = best.policy.detached();
  best.names = par.names();
  best.parameters = par.physical(best.policy);
  best.objective = evaluate(cfg, par, par.coordinates(best.policy), obj, scenarios, false, options.chunk_paths).value;
  if (family != PolicyKind::free_form) {
    best.t_full_abatement = policy::full_abatement_time(best.policy.mu0.scalar(), best.policy.a0.scalar());
  }
  return best;
}

double first_order_condition_check(const engine::ModelConfig& cfg, const PolicySpec& reduced,
                                   const objective::ObjectiveSpec& obj, const rates::RateScenarioSet& scenarios) {
  const Parameterization par(PolicyKind::reduced, reduced, cfg.steps());
  const PolicySpec plain = reduced.detached();
  const Evaluation e = evaluate(cfg, par, par.coordinates(plain), obj, scenarios, true);
  const double dw_da0 = e.gradient[0] / 0.01;
  const double mu0 = plain.mu0.scalar();
  const double a0 = plain.a0.scalar();
  const double t_full = (1.0 - mu0) / a0;
  return dw_da0 * (-(1.0 - mu0) / (t_full * t_full));
}

}  // namespace iam::calibration
