#pragma once

// Shared helpers for the test suites: a seeded random generator for property
// tests and central finite differences.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "iam/stochvar.hpp"

namespace iam::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }
  std::vector<double> normals(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = normal();
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

/// (f(x + h) - f(x - h)) / 2h with h = rel * max(|x|, 1e-3).
inline double central_difference(const std::function<double(double)>& f, double x, double rel = 1e-6) {
  const double h = rel * std::max(std::abs(x), 1e-3);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace iam::testing
