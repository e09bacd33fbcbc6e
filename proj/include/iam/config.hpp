#pragma once

// JSON configuration: one document with optional sections climate, economy,
// costs, policy, objective, rates and experiment plus top-level horizon/dt.
// Every key is optional; unknown keys are rejected with their line number.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "iam/calibration.hpp"
#include "iam/engine.hpp"

namespace iam::config {

struct ExperimentConfig {
  std::vector<double> rates{0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> volatilities{0.0, 0.0025, 0.005, 0.0075, 0.01};
  std::vector<double> quantiles{1.0, 0.5, 0.25, 0.1, 0.05};
  std::vector<double> funding_periods{0.0, 5.0, 10.0, 20.0};
  std::vector<double> horizons{100.0, 500.0, 2000.0};
  /// Policy family for `calibrate`.
  policy::PolicyKind family = policy::PolicyKind::reduced;
  /// Tail for sweep-quantile.
  stochvar::Tail quantile_tail = stochvar::Tail::right;
  /// Volatility used by sweep-quantile and abatement-dist.
  double volatility = 0.01;
  /// ES level used by sweep-vol and abatement-dist.
  double alpha = 0.05;
  /// Generation span for cost-dist, years.
  double generation_span = 100.0;
  /// Bump time for `sensitivity`, years.
  double sensitivity_time = 2.0;
  std::size_t bins = 40;
  /// Comparison window for `convergence`, years.
  double compare_until = 300.0;
  /// Paths for stochastic calibrations (sweep-vol, sweep-quantile, abatement-dist).
  std::size_t calibration_paths = 1000;
  calibration::AdamOptions adam;
  std::size_t chunk_paths = 250;
};

struct Config {
  engine::ModelConfig model;
  ExperimentConfig experiment;

  void validate() const;
};

/// Parses `text`; `source` names the document in diagnostics.
Config parse(const std::string& text, const std::string& source = "<config>");
/// Reads and parses a file (Error with the path on failure to open).
Config load(const std::string& path);

}  // namespace iam::config
